#include "geoent/verify.hpp"

#include <algorithm>
#include <random>

#include "geoent/optimize.hpp"
#include "geoent/schmidt.hpp"
#include "geoent/symmetric.hpp"

namespace geoent {

namespace {

using Rng = std::mt19937_64;

TargetState random_target(int q, Rng& rng) {
  std::normal_distribution<double> dist;
  VectorX<double> c(basis_dim(q));
  for (auto& v : c) v = dist(rng);
  return TargetState(q, c / c.norm());
}

ProductParams random_params(int q, Rng& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  VectorX<double> x(2 * q);
  for (auto& v : x) v = dist(rng);
  return ProductParams(std::move(x));
}

double max_abs(const MatrixX<double>& m) { return m.cwiseAbs().maxCoeff(); }

class Recorder {
 public:
  Recorder(std::string suite, const std::function<void(const CheckResult&)>& sink)
      : suite_(std::move(suite)), sink_(sink) {}

  void check(const std::string& name, int q, int p, double residual, double tolerance) {
    CheckResult c{suite_, name, q, p, residual, tolerance, residual <= tolerance};
    ok_ = ok_ && c.pass;
    sink_(c);
  }
  void flag(const std::string& name, int q, int p, bool holds) { check(name, q, p, holds ? 0.0 : 1.0, 0.0); }
  bool ok() const { return ok_; }

 private:
  std::string suite_;
  const std::function<void(const CheckResult&)>& sink_;
  bool ok_ = true;
};

// Central differences of D^2, relative to the larger of 1 and |grad|.
bool gradient_suite(int qmax, Rng& rng, const std::function<void(const CheckResult&)>& sink) {
  Recorder rec("gradient", sink);
  const double h = 1e-6;
  for (int q = 2; q <= qmax; ++q) {
    double worst = 0;
    for (int k = 0; k < 10; ++k) {
      const TargetState target = random_target(q, rng);
      const ProductParams params = random_params(q, rng);
      const VectorX<double> g = gradient(target, params);
      VectorX<double> fd(g.size());
      for (Eigen::Index i = 0; i < g.size(); ++i) {
        VectorX<double> xp = params.flat(), xm = params.flat();
        xp(i) += h;
        xm(i) -= h;
        fd(i) = (distance_value(target, ProductParams(xp)) - distance_value(target, ProductParams(xm))) / (2 * h);
      }
      worst = std::max(worst, (fd - g).cwiseAbs().maxCoeff() / std::max(1.0, g.cwiseAbs().maxCoeff()));
    }
    rec.check("finite-difference-gradient", q, -1, worst, 1e-6);
  }
  return rec.ok();
}

bool hessian_suite(int qmax, Rng& rng, const std::function<void(const CheckResult&)>& sink) {
  Recorder rec("hessian", sink);
  const double h = 1e-6;
  for (int q = 2; q <= qmax; ++q) {
    double worst = 0;
    for (int k = 0; k < 3; ++k) {
      const TargetState target = random_target(q, rng);
      const ProductParams params = random_params(q, rng);
      const MatrixX<double> H = build_hessian(target, params);
      MatrixX<double> fd(H.rows(), H.cols());
      for (Eigen::Index i = 0; i < H.cols(); ++i) {
        VectorX<double> xp = params.flat(), xm = params.flat();
        xp(i) += h;
        xm(i) -= h;
        fd.col(i) = (gradient(target, ProductParams(xp)) - gradient(target, ProductParams(xm))) / (2 * h);
      }
      worst = std::max(worst, max_abs(fd - H) / std::max(1.0, max_abs(H)));
    }
    rec.check("finite-difference-hessian", q, -1, worst, 1e-6);
  }
  for (int q = 3; q <= qmax; ++q) {
    for (int p = 1; p < q; ++p) {
      const auto sol = solve_dicke<double>(q, p);
      const TargetState target = make_dicke(q, p);
      const MatrixX<double> H = build_hessian(target, embed_symmetric(sol.params()));
      const MatrixX<double> B = hessian_from_blocks(q, symmetric_blocks(target, sol.params()));
      rec.check("symmetric-block-form", q, p, max_abs(H - B) / max_abs(H), 1e-12);
    }
  }
  return rec.ok();
}

bool eigen_suite(int qmax, const std::function<void(const CheckResult&)>& sink) {
  Recorder rec("eigen", sink);
  for (int q = 3; q <= qmax; ++q) {
    for (int p = 1; p < q; ++p) {
      const auto sol = solve_dicke<double>(q, p);
      const TargetState target = make_dicke(q, p);
      const ProductParams params = embed_symmetric(sol.params());
      const MatrixX<double> H = build_hessian(target, params);
      const auto spec = eig_symmetric(H, params);
      const double hnorm = spec.eigenvalues.cwiseAbs().maxCoeff();

      double pairResidual = 0;
      for (const auto& ep : analytic_eigenpairs(q, symmetric_blocks(target, sol.params())))
        pairResidual = std::max(pairResidual, (H * ep.vector - ep.value * ep.vector).cwiseAbs().maxCoeff());
      rec.check("analytic-eigenpairs", q, p, pairResidual / hnorm, 1e-10);

      VectorX<double> expected(2 * q);
      expected << VectorX<double>::Zero(q - 1), VectorX<double>::Constant(q - 1, sol.spectrum.e3), sol.spectrum.e4,
          sol.spectrum.e1;
      std::sort(expected.begin(), expected.end());
      rec.check("family-spectrum", q, p, (spec.eigenvalues - expected).cwiseAbs().maxCoeff() / sol.tau, 1e-9);
      rec.check("jacobi-reconstruction", q, p, spec.reconstructionResidual / hnorm, 1e-12);
      rec.flag("zero-modes-equal-q-minus-1", q, p, spec.zeroModes == q - 1);
      rec.flag("local-minimum", q, p, spec.classification == Classification::LocalMinimum);
    }
  }
  return rec.ok();
}

bool schmidt_suite(int qmax, Rng& rng, const std::function<void(const CheckResult&)>& sink) {
  Recorder rec("schmidt", sink);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi / 2);
  for (int q = 2; q <= qmax; ++q) {
    double worst = 0;
    for (int k = 0; k < 10; ++k) {
      const ProductParams params = random_params(q, rng);
      const auto f = svd_factors(params);
      VectorX<double> sigma = to_schmidt_basis(product_coeffs(params), q, f);
      worst = std::max(worst, std::abs(sigma(0) - f.sigma));
      sigma(0) = 0;
      worst = std::max(worst, sigma.cwiseAbs().maxCoeff());
    }
    rec.check("single-singular-value", q, -1, worst, 1e-12);
  }
  for (int q = 3; q <= qmax; ++q) {
    for (int p = 1; p < q; ++p) {
      const auto c = schmidt_critical<double>(q, p);
      const auto sol = solve_dicke<double>(q, p);
      rec.check("tan2-theta-c", q, p, std::abs(c.tan2ThetaC - std::pow(sol.alpha1 / sol.alpha0, 2)), 1e-12);
      rec.check("sigma-c-squared", q, p, std::abs(c.sigmaCSq - sol.nToQ), 1e-12);
    }
    const TargetState w = make_dicke(q, 1);
    double worst = 0;
    for (int k = 0; k < 10; ++k) {
      std::vector<double> thetas(static_cast<std::size_t>(q));
      for (auto& t : thetas) t = angle(rng);
      const double s = std::uniform_real_distribution<double>(0.1, 1.5)(rng);
      const double cart = distance_value(w, polar_to_params<double>(s, thetas));
      const double sig = polar_distance(s, sigma_entry<double>(w, thetas));
      const double pol = polar_distance_single_excitation<double>(s, thetas);
      worst = std::max({worst, std::abs(cart - sig), std::abs(cart - pol), std::abs(sig - pol)});
    }
    rec.check("three-way-distance", q, 1, worst, 1e-10);
  }
  return rec.ok();
}

}  // namespace

const std::vector<std::string> kVerifySuites = {"gradient", "hessian", "eigen", "schmidt", "all"};

io::json to_json(const CheckResult& c) {
  io::json j = {{"suite", c.suite},         {"check", c.check},         {"q", c.q},
                {"residual", c.residual},   {"tolerance", c.tolerance}, {"pass", c.pass}};
  if (c.p >= 0) j["p"] = c.p;
  return j;
}

bool run_verify(const std::string& suite, int qmax, const std::function<void(const CheckResult&)>& sink,
                std::uint64_t seed) {
  if (std::find(kVerifySuites.begin(), kVerifySuites.end(), suite) == kVerifySuites.end())
    throw DomainError("unknown suite '" + suite + "'");
  if (qmax < 2 || qmax > kVerifyMaxQubits)
    throw DomainError("qmax must lie in [2, " + std::to_string(kVerifyMaxQubits) + "], got " + std::to_string(qmax));
  Rng rng(seed);
  const bool all = suite == "all";
  bool ok = true;
  if (all || suite == "gradient") ok = gradient_suite(qmax, rng, sink) && ok;
  if (all || suite == "hessian") ok = hessian_suite(qmax, rng, sink) && ok;
  if (all || suite == "eigen") ok = eigen_suite(qmax, sink) && ok;
  if (all || suite == "schmidt") ok = schmidt_suite(qmax, rng, sink) && ok;
  return ok;
}

}  // namespace geoent
