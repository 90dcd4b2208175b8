#include <doctest.h>

#include "geoent/optimize.hpp"
#include "geoent/symmetric.hpp"
#include "oracle.hpp"

using namespace geoent;

namespace {

OptimOptions with_seeds(int n, int threads = 1) {
  OptimOptions o;
  o.seedList = seed_range(static_cast<std::size_t>(n));
  o.threads = threads;
  return o;
}

// C(q,p) (p/q)^p (1-p/q)^(q-p), by direct arithmetic
double closed_form_dsq(int q, int p) {
  const double f = double(p) / q;
  return 1 - oracle::binomial(q, p) * std::pow(f, p) * std::pow(1 - f, q - p);
}

}  // namespace

TEST_CASE("minimize: Dicke(3,1) from a symmetric start") {
  const auto e = minimize(make_dicke(3, 1), embed_symmetric(SymmetricParams(3, 0.5, 0.5)), OptimOptions{});
  CHECK(e.converged);
  CHECK(e.dsq == doctest::Approx(5.0 / 9).epsilon(1e-8));
  CHECK(e.gradNorm <= 1e-9);
}

TEST_CASE("minimize: product target reaches zero") {
  const auto e = minimize(make_dicke(2, 0), ProductParams::from_pairs({{0.3, 0.7}, {0.9, 0.2}}), OptimOptions{});
  CHECK(e.converged);
  CHECK(std::abs(e.dsq) <= 1e-10);
}

TEST_CASE("minimize: escape from the ring(6) symmetric saddle") {
  const auto r = solve_ring(6);
  const TargetState t = make_ring(6);
  const ProductParams s = embed_symmetric(r.params());
  const auto spec = eig_symmetric(build_hessian(t, s), s);
  REQUIRE(spec.eigenvalues(0) < 0);
  const auto e = minimize(t, ProductParams(s.flat() + 1e-3 * spec.eigenvectors.col(0)), OptimOptions{});
  CHECK(e.converged);
  CHECK(e.dsq < r.dsq - 1e-6);
}

TEST_CASE("gauge_fix equalizes norms without moving D^2") {
  std::mt19937_64 rng(17);
  for (int q = 2; q <= 6; ++q) {
    const TargetState t(q, oracle::random_unit(q, rng));
    const ProductParams p(oracle::random_params(q, rng));
    const ProductParams g = gauge_fix(p);
    for (int k = 1; k < q; ++k) CHECK(g.norm(k) == doctest::Approx(g.norm(0)).epsilon(1e-12));
    CHECK(g.norm_product() == doctest::Approx(p.norm_product()).epsilon(1e-12));
    CHECK(std::abs(distance_value(t, g) - distance_value(t, p)) <= 1e-12);
  }
}

TEST_CASE("minimize results: stationary, on the critical identity, gauge-fixed") {
  std::mt19937_64 rng(19);
  for (int k = 0; k < 12; ++k) {
    const int q = 2 + k % 4;
    const TargetState t(q, oracle::random_unit(q, rng));
    const auto e = minimize(t, random_start(q, 100 + k), OptimOptions{});
    if (!e.converged) continue;
    CHECK(e.gradNorm <= 1e-9);
    CHECK(std::abs(e.dsq - (1 - e.params.norm_product())) <= 1e-7);
    for (int s = 1; s < q; ++s) CHECK(e.params.norm(s) == doctest::Approx(e.params.norm(0)).epsilon(1e-10));
  }
}

TEST_CASE("multistart examples") {
  CHECK(multistart(make_dicke(4, 2), 16, with_seeds(16)).dsq == doctest::Approx(5.0 / 8).epsilon(1e-8));
  CHECK(multistart(make_dicke(2, 1), 8, with_seeds(8)).dsq == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(multistart(make_dicke(3, 0), 4, with_seeds(4)).dsq <= 1e-10);
}

TEST_CASE("multistart agrees with the closed form on small Dicke targets") {
  for (int q = 2; q <= 5; ++q)
    for (int p = 1; p < q; ++p)
      CHECK(std::abs(multistart(make_dicke(q, p), 32, with_seeds(32, 4)).dsq - closed_form_dsq(q, p)) <= 1e-8);
}

TEST_CASE("multistart is deterministic and thread-count independent") {
  const TargetState t = make_ring(5);
  const auto a = multistart(t, 8, with_seeds(8, 1));
  const auto b = multistart(t, 8, with_seeds(8, 1));
  const auto c = multistart(t, 8, with_seeds(8, 4));
  CHECK(a.params.flat() == b.params.flat());
  CHECK(a.params.flat() == c.params.flat());
  CHECK(a.dsq == c.dsq);
  CHECK(a.iters == c.iters);
}

TEST_CASE("random_start draws from the unit box with no tiny pairs") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const ProductParams p = random_start(6, s);
    CHECK(p.flat().cwiseAbs().maxCoeff() <= 1.0);
    for (int t = 0; t < 6; ++t) CHECK(std::sqrt(p.norm(t)) >= 1e-3);
    CHECK(random_start(6, s).flat() == p.flat());
  }
}

TEST_CASE("option and argument validation") {
  OptimOptions bad;
  bad.maxIter = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = OptimOptions{};
  bad.gradTol = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_THROWS_AS(multistart(make_dicke(3, 1), 4, with_seeds(2)), DomainError);
  CHECK_THROWS_AS(multistart(make_dicke(3, 1), 0, with_seeds(2)), DomainError);
  CHECK_THROWS_AS(minimize(make_dicke(3, 1), ProductParams::from_pairs({{1, 0}, {0, 0}, {1, 1}}), OptimOptions{}),
                  DomainError);
}

TEST_CASE("an iteration budget of one leaves the run unconverged") {
  OptimOptions o;
  o.maxIter = 1;
  const auto e = minimize(make_dicke(4, 2), random_start(4, 3), o);
  CHECK_FALSE(e.converged);
  CHECK(e.iters == 1);
}
