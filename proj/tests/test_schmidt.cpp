#include <doctest.h>

#include <numbers>

#include "geoent/schmidt.hpp"
#include "oracle.hpp"

using namespace geoent;

namespace {

std::vector<double> random_angles(int q, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0, std::numbers::pi / 2);
  std::vector<double> a(static_cast<std::size_t>(q));
  for (auto& x : a) x = d(rng);
  return a;
}

}  // namespace

TEST_CASE("reduced density of a product state") {
  const Matrix2<double> r = reduced_density(ProductParams::from_pairs({{1, 0}, {3, 4}}), 0);
  Matrix2<double> expect;
  expect << 25, 0, 0, 0;
  CHECK(r == expect);
  CHECK_THROWS_AS(reduced_density(ProductParams::from_pairs({{1, 0}, {3, 4}}), 2), DomainError);

  std::mt19937_64 rng(51);
  for (int k = 0; k < 50; ++k) {
    const int q = 2 + k % 5;
    const ProductParams p(oracle::random_params(q, rng));
    for (int t = 0; t < q; ++t) {
      const Eigen::SelfAdjointEigenSolver<Matrix2<double>> es(reduced_density(p, t));
      CHECK(std::abs(es.eigenvalues()(0)) <= 1e-12);
      CHECK(es.eigenvalues()(1) == doctest::Approx(p.norm_product()).epsilon(1e-12));
      // eigenvector along the pair itself
      const Pair<double> u = es.eigenvectors().col(1);
      CHECK(std::abs(u(0) * p.pair(t)(1) - u(1) * p.pair(t)(0)) <= 1e-10 * std::sqrt(p.norm(t)));
    }
  }
}

TEST_CASE("svd factors collapse the product state to one entry") {
  std::mt19937_64 rng(53);
  for (int k = 0; k < 100; ++k) {
    const int q = 1 + k % 8;
    const ProductParams p(oracle::random_params(q, rng));
    const auto f = svd_factors(p);
    CHECK(f.sigma == doctest::Approx(std::sqrt(p.norm_product())).epsilon(1e-14));
    for (const auto& r : f.rotations) {
      CHECK((r.transpose() * r - Matrix2<double>::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
    }
    oracle::Vec s = to_schmidt_basis(oracle::product_tensor(p.flat()), q, f);
    CHECK(s(0) == doctest::Approx(f.sigma).epsilon(1e-12));
    s(0) = 0;
    CHECK(s.cwiseAbs().maxCoeff() <= 1e-12);
  }
  const auto id = svd_factors(ProductParams::from_pairs({{1, 0}, {1, 0}, {1, 0}}));
  CHECK(id.sigma == 1.0);
  for (const auto& r : id.rotations) CHECK(r == Matrix2<double>::Identity());
}

TEST_CASE("two-qubit block: sqrt(N_A N_B) in the corner") {
  const ProductParams p = ProductParams::from_pairs({{0.3, -1.2}, {2.0, 0.5}});
  const oracle::Vec s = to_schmidt_basis(product_coeffs(p), 2, svd_factors(p));
  oracle::Vec expect = oracle::Vec::Zero(4);
  expect(0) = std::sqrt(p.norm(0) * p.norm(1));
  CHECK((s - expect).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("Sigma round trip recovers the target") {
  std::mt19937_64 rng(57);
  for (int q = 2; q <= 6; ++q) {
    const oracle::Vec chi = oracle::random_unit(q, rng);
    const auto f = svd_factors(ProductParams(oracle::random_params(q, rng)));
    CHECK((from_schmidt_basis(to_schmidt_basis(chi, q, f), q, f) - chi).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("sigma_entry") {
  const TargetState w = make_dicke(3, 1);
  for (double th : {0.1, 0.5, 0.9, 1.3}) {
    const std::vector<double> a(3, th);
    CHECK(sigma_entry<double>(w, a) ==
          doctest::Approx(std::sqrt(3.0) * std::cos(th) * std::cos(th) * std::sin(th)).epsilon(1e-14));
  }
  std::mt19937_64 rng(59);
  for (int q = 2; q <= 6; ++q) {
    const TargetState t(q, oracle::random_unit(q, rng));
    CHECK(sigma_entry<double>(t, std::vector<double>(q, 0.0)) == doctest::Approx(t(0)).epsilon(1e-14));
    const auto a = random_angles(q, rng);
    CHECK(std::abs(sigma_entry<double>(t, a) - oracle::sigma_entry(t.coeffs(), a)) <= 1e-13);
  }
  // equal angles on a Dicke target: C(q,p)^(1/2) cos^(q-p) sin^p
  for (int q = 3; q <= 7; ++q)
    for (int p = 0; p <= q; ++p) {
      const double th = 0.7;
      CHECK(sigma_entry<double>(make_dicke(q, p), std::vector<double>(q, th)) ==
            doctest::Approx(std::sqrt(oracle::binomial(q, p)) * std::pow(std::cos(th), q - p) * std::pow(std::sin(th), p))
                .epsilon(1e-13));
    }
  CHECK_THROWS_AS(sigma_entry<double>(w, std::vector<double>(2, 0.0)), DomainError);
}

TEST_CASE("polar distance and its minimum") {
  CHECK(polar_distance(0.0, 0.0) == 1.0);
  CHECK(polar_minimum(0.0).sigmaC == 0.0);
  CHECK(polar_minimum(0.0).dcSquared == 1.0);
  CHECK(polar_minimum(-0.3).sigmaC == 0.0);
  for (double s : {0.1, 0.4, 0.77}) {
    CHECK(polar_distance(s, s) == doctest::Approx(1 - s * s).epsilon(1e-15));
    CHECK(polar_minimum(s).dcSquared == doctest::Approx(1 - s * s).epsilon(1e-15));
    CHECK(polar_distance(s + 0.01, s) > polar_distance(s, s));
    CHECK(polar_distance(s - 0.01, s) > polar_distance(s, s));
  }
  CHECK_THROWS_AS(polar_distance(-1.0, 0.5), DomainError);

  const auto c = schmidt_critical(3, 1);
  const double s = sigma_entry<double>(make_dicke(3, 1), std::vector<double>(3, c.thetaC));
  CHECK(s * s == doctest::Approx(4.0 / 9).epsilon(1e-14));
  CHECK(polar_minimum(s).dcSquared == doctest::Approx(5.0 / 9).epsilon(1e-14));
}

TEST_CASE("schmidt_critical") {
  const auto c = schmidt_critical(3, 1);
  CHECK(c.tan2ThetaC == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::pow(std::tan(c.thetaC), 2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(c.sigmaCSq == doctest::Approx(4.0 / 9).epsilon(1e-14));
  for (int q : {4, 6, 8, 10}) CHECK(schmidt_critical(q, q / 2).thetaC == doctest::Approx(std::numbers::pi / 4).epsilon(1e-14));
  CHECK(schmidt_critical(5, 2).sigmaCSq == doctest::Approx(10.0 * (4.0 / 25) * (27.0 / 125)).epsilon(1e-14));
  for (int q = 3; q <= 10; ++q)
    for (int p = 1; p < q; ++p) {
      const auto k = schmidt_critical(q, p);
      CHECK(std::abs(k.sigmaCSq - solve_dicke(q, p).nToQ) <= 1e-12);
      CHECK(k.thetaC > 0);
      CHECK(k.thetaC < std::numbers::pi / 2);
      // theta_c extremizes the equal-angle Sigma entry
      auto s = [&](double th) { return sigma_entry<double>(make_dicke(q, p), std::vector<double>(q, th)); };
      const double h = 1e-6;
      CHECK(std::abs(s(k.thetaC + h) - s(k.thetaC - h)) / (2 * h) <= 1e-8);
      CHECK(s(k.thetaC) * s(k.thetaC) == doctest::Approx(k.sigmaCSq).epsilon(1e-12));
    }
  CHECK_THROWS_AS(schmidt_critical(2, 1), DomainError);
  CHECK_THROWS_AS(schmidt_critical(5, 5), DomainError);
}

TEST_CASE("polar parametrization and three distance forms") {
  std::mt19937_64 rng(61);
  for (int q = 2; q <= 8; ++q) {
    const TargetState w = make_dicke(q, 1);
    for (int k = 0; k < 10; ++k) {
      const auto a = random_angles(q, rng);
      const double sigma = std::uniform_real_distribution<double>(0.05, 1.5)(rng);
      const ProductParams x = polar_to_params<double>(sigma, a);
      for (int t = 0; t < q; ++t) CHECK(x.norm(t) == doctest::Approx(std::pow(sigma, 2.0 / q)).epsilon(1e-13));
      const double cart = distance_value(w, x);
      CHECK(std::abs(cart - polar_distance(sigma, sigma_entry<double>(w, a))) <= 1e-10);
      CHECK(std::abs(cart - polar_distance_single_excitation<double>(sigma, a)) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(polar_to_params<double>(0.0, std::vector<double>(3, 0.1)), DomainError);
}

TEST_CASE("cos theta_c at the critical point equals sigma_c") {
  for (int q = 3; q <= 9; ++q)
    for (int p = 1; p < q; ++p) {
      const auto k = schmidt_critical(q, p);
      const TargetState t = make_dicke(q, p);
      const std::vector<double> a(q, k.thetaC);
      const auto ci = critical_identities(t, polar_to_params<double>(std::sqrt(k.sigmaCSq), a));
      CHECK(ci.stationary);
      CHECK(std::abs(ci.cosThetaC - sigma_entry<double>(t, a)) <= 1e-10);
    }
}

TEST_CASE("printed polar Hessian closed forms, q = 3") {
  const auto h = polar_hessian(3);
  CHECK(h.nn == doctest::Approx(4.0 / 9).epsilon(1e-15));
  CHECK(h.B == doctest::Approx(8.0 / 9).epsilon(1e-14));
  CHECK(h.M == doctest::Approx(9.0 / 8).epsilon(1e-14));
  CHECK(h.X == doctest::Approx(8.0 / 27).epsilon(1e-14));
  CHECK(h.Z == 0.0);
  CHECK(h.eigenvalues(0) == doctest::Approx(8.0 / 9).epsilon(1e-14));
  CHECK(h.eigenvalues(1) == doctest::Approx(179.0 / 216).epsilon(1e-14));
  CHECK(h.eigenvalues(2) == doctest::Approx(179.0 / 216).epsilon(1e-14));
  CHECK(h.eigenvalues(3) == doctest::Approx(499.0 / 216).epsilon(1e-14));
  CHECK_THROWS_AS(polar_hessian(2), DomainError);
}

TEST_CASE("derived polar Hessian matches finite differences") {
  for (int q = 3; q <= 10; ++q) {
    const auto exact = polar_hessian_exact(q);
    const MatrixX<double> fd = polar_hessian_numeric(q);
    CHECK((exact.matrix() - fd).cwiseAbs().maxCoeff() <= 1e-5);
    CHECK(exact.Z == 0.0);
    const auto spec = eig_symmetric<double>(fd);
    CHECK(spec.zeroModes == 0);
    CHECK(spec.eigenvalues(0) > 0);
    oracle::Vec sorted = exact.eigenvalues;
    std::sort(sorted.begin(), sorted.end());
    CHECK((spec.eigenvalues - sorted).cwiseAbs().maxCoeff() <= 1e-5);
    const auto printed = polar_hessian(q);
    CHECK((printed.eigenvalues.array() > 0).all());
  }
  const auto e3 = polar_hessian_exact(3);
  CHECK(e3.B == doctest::Approx(9.0 / 8).epsilon(1e-14));
  CHECK(e3.M == doctest::Approx(8.0 / 9).epsilon(1e-14));
  CHECK(e3.X == doctest::Approx(4.0 / 9).epsilon(1e-14));
}

TEST_CASE("printed polar Hessian differs from the finite-difference Hessian") {
  for (int q = 3; q <= 8; ++q) {
    const MatrixX<double> fd = polar_hessian_numeric(q);
    CHECK((polar_hessian(q).matrix() - fd).cwiseAbs().maxCoeff() > 0.1);
  }
}

TEST_CASE("chain rule from the Cartesian blocks gives d2D^2/dNN^2") {
  for (int q = 3; q <= 10; ++q) {
    const auto c = polar_chain_rule(q);
    CHECK(std::abs(c.value - polar_hessian_exact(q).B) <= 1e-10 * polar_hessian_exact(q).B);
    CHECK(c.ratioResidual <= 1e-10 * c.dAlpha0);
    CHECK(c.normResidual <= 1e-10);
  }
}
