#pragma once

// Schmidt-basis view of the distance: per-qubit rotations that collapse a
// product state onto one singular value sigma, the matching target entry
// Sigma_{00...0}, and the (sigma, theta_1..theta_q) polar form of D^2.
//
// Indices here are 0-based, so the "first" Schmidt entry is flat index 0.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "geoent/hessian.hpp"
#include "geoent/symmetric.hpp"

namespace geoent {

/// Trace over every qubit but t: [prod_{s!=t} N_s] * x_t x_t^T.
template <typename Scalar>
Matrix2<Scalar> reduced_density(const BasicProductParams<Scalar>& params, int t) {
  if (t < 0 || t >= params.qubits())
    throw DomainError("qubit index " + std::to_string(t) + " out of range");
  const Pair<Scalar> x = params.pair(t);
  return params.norm_product_except(t) * (x * x.transpose());
}

template <typename Scalar>
Matrix2<Scalar> rotation(Scalar theta) {
  Matrix2<Scalar> r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

template <typename Scalar>
struct SchmidtFactors {
  std::vector<Matrix2<Scalar>> rotations;  // columns (x0,x1)/sqrt(N) and (-x1,x0)/sqrt(N)
  Scalar sigma;                            // sqrt(prod_t N_t)
};

template <typename Scalar>
SchmidtFactors<Scalar> svd_factors(const BasicProductParams<Scalar>& params) {
  params.require_nondegenerate();
  SchmidtFactors<Scalar> f;
  for (int t = 0; t < params.qubits(); ++t) {
    const Pair<Scalar> u = params.pair(t) / std::sqrt(params.norm(t));
    Matrix2<Scalar> r;
    r << u(0), -u(1), u(1), u(0);
    f.rotations.push_back(r);
  }
  f.sigma = std::sqrt(params.norm_product());
  return f;
}

/// Sigma = [A^-1 (x) B^-1 (x) ...] tensor; the inverse of each rotation is its transpose.
template <typename Scalar>
VectorX<Scalar> to_schmidt_basis(const VectorX<Scalar>& tensor, int q, const SchmidtFactors<Scalar>& f) {
  std::vector<Matrix2<Scalar>> inv;
  for (const auto& r : f.rotations) inv.push_back(r.transpose());
  return apply_local<Scalar>(tensor, q, inv);
}

template <typename Scalar>
VectorX<Scalar> from_schmidt_basis(const VectorX<Scalar>& sigma, int q, const SchmidtFactors<Scalar>& f) {
  return apply_local<Scalar>(sigma, q, f.rotations);
}

/// Sigma_{00...0}: the target contracted with the first row (cos, sin) of every inverse rotation.
/// It depends on the angles only, never on sigma.
template <typename Scalar>
Scalar sigma_entry(const BasicTargetState<Scalar>& target, std::span<const Scalar> thetas) {
  const int q = target.qubits();
  if (static_cast<int>(thetas.size()) != q)
    throw DomainError("sigma_entry needs one angle per qubit");
  VectorX<Scalar> x(2 * q);
  for (int t = 0; t < q; ++t) x.template segment<2>(2 * t) << std::cos(thetas[t]), std::sin(thetas[t]);
  return contract_except(target.coeffs(), q, BasicProductParams<Scalar>(std::move(x)))(0);
}

template <typename Scalar>
Scalar polar_distance(Scalar sigma, Scalar sigmaEntry) {
  if (sigma < 0) throw DomainError("sigma must be non-negative");
  return Scalar(1) + sigma * sigma - Scalar(2) * sigma * sigmaEntry;
}

template <typename Scalar>
struct PolarMinimum {
  Scalar sigmaC;     // argmin over sigma >= 0
  Scalar dcSquared;  // 1 - sigmaC^2
};

template <typename Scalar>
PolarMinimum<Scalar> polar_minimum(Scalar sigmaEntry) {
  const Scalar s = std::max(sigmaEntry, Scalar(0));
  return {s, Scalar(1) - s * s};
}

/// Equal-radius polar parametrization: qubit t gets r (cos theta_t, sin theta_t), r = sigma^(1/q).
template <typename Scalar>
BasicProductParams<Scalar> polar_to_params(Scalar sigma, std::span<const Scalar> thetas) {
  if (!(sigma > 0)) throw DomainError("polar point needs sigma > 0");
  const int q = static_cast<int>(thetas.size());
  const Scalar r = std::pow(sigma, Scalar(1) / Scalar(q));
  VectorX<Scalar> x(2 * q);
  for (int t = 0; t < q; ++t) x.template segment<2>(2 * t) << r * std::cos(thetas[t]), r * std::sin(thetas[t]);
  return BasicProductParams<Scalar>(std::move(x));
}

/// D^2 = 1 - (2 sigma / sqrt q) sum_x sin(theta_x) prod_{j!=x} cos(theta_j) + sigma^2.
/// Only valid for the single-excitation Dicke target, whose coefficients are all 1/sqrt(q).
template <typename Scalar>
Scalar polar_distance_single_excitation(Scalar sigma, std::span<const Scalar> thetas) {
  const int q = static_cast<int>(thetas.size());
  Scalar sum(0);
  for (int x = 0; x < q; ++x) {
    Scalar term = std::sin(thetas[x]);
    for (int j = 0; j < q; ++j)
      if (j != x) term *= std::cos(thetas[j]);
    sum += term;
  }
  return Scalar(1) - Scalar(2) * sigma / std::sqrt(Scalar(q)) * sum + sigma * sigma;
}

template <typename Scalar>
struct SchmidtCritical {
  Scalar thetaC;     // in (0, pi/2)
  Scalar tan2ThetaC; // p / (q-p)
  Scalar sigmaCSq;   // C(q,p) (p/q)^p (1-p/q)^(q-p)
};

template <typename Scalar = double>
SchmidtCritical<Scalar> schmidt_critical(int q, int p) {
  SchmidtCritical<Scalar> c;
  c.sigmaCSq = dicke_n_to_q<Scalar>(q, p);  // range-checks (q, p)
  c.tan2ThetaC = Scalar(p) / Scalar(q - p);
  c.thetaC = std::atan(std::sqrt(c.tan2ThetaC));
  return c;
}

/// Hessian of D^2(NN, theta_1..theta_q) with NN = sigma^2 = N^q, for the
/// single-excitation Dicke target at its symmetric critical point.
template <typename Scalar>
struct PolarHessian {
  int q;
  Scalar nn;  // ((q-1)/q)^(q-1)
  Scalar B;   // d2/dNN2
  Scalar Z;   // d2/dNN dtheta_i
  Scalar M;   // d2/dtheta_i2
  Scalar X;   // d2/dtheta_i dtheta_j
  VectorX<Scalar> eigenvalues;  // e1, e2..e_q, e_(q+1)

  MatrixX<Scalar> matrix() const {
    MatrixX<Scalar> h = MatrixX<Scalar>::Constant(q + 1, q + 1, X);
    h.row(0).setConstant(Z);
    h.col(0).setConstant(Z);
    h(0, 0) = B;
    for (int i = 1; i <= q; ++i) h(i, i) = M;
    return h;
  }
};

namespace detail {

template <typename Scalar>
Scalar polar_critical_nn(int q) {
  if (q < 3) throw DomainError("polar Hessian needs q >= 3, got " + std::to_string(q));
  check_qubit_count(q);
  return std::pow(Scalar(q - 1) / Scalar(q), q - 1);
}

template <typename Scalar>
VectorX<Scalar> polar_eigenvalues(int q, Scalar b, Scalar thetaSpread, Scalar thetaUniform) {
  VectorX<Scalar> e(q + 1);
  e(0) = b;
  e.segment(1, q - 1).setConstant(thetaSpread);
  e(q) = thetaUniform;
  return e;
}

}  // namespace detail

/// Entries and eigenvalues exactly as the published closed forms print them:
///   B = 2 NN, Z = 0, M = 1/(2 NN), X = (2/q)(2 - (q-2)(q-1)^(3/2 - q/2)) NN,
///   eigenvalues B, M - X (q-1 times), M + 4X.
/// polar_hessian_exact() and polar_hessian_numeric() disagree with these for
/// every q; see the README for the corrected forms.
template <typename Scalar = double>
PolarHessian<Scalar> polar_hessian(int q) {
  PolarHessian<Scalar> h;
  h.q = q;
  h.nn = detail::polar_critical_nn<Scalar>(q);
  h.B = Scalar(2) * h.nn;
  h.Z = Scalar(0);
  h.M = Scalar(1) / (Scalar(2) * h.nn);
  h.X = Scalar(2) / Scalar(q) *
        (Scalar(2) - Scalar(q - 2) * std::pow(Scalar(q - 1), Scalar(1.5) - Scalar(q) / Scalar(2))) * h.nn;
  h.eigenvalues = detail::polar_eigenvalues<Scalar>(q, h.B, h.M - h.X, h.M + Scalar(4) * h.X);
  return h;
}

/// Second derivatives of 1 + NN - 2 sqrt(NN) Sigma(theta) at the critical point:
///   B = Sigma / (2 NN^(3/2)) = 1/(2 NN),  M = 2 sqrt(NN) Sigma = 2 NN,
///   X = 2 NN / (q-1),  Z = 0,  eigenvalues B, M - X (q-1 times), M + (q-1) X.
template <typename Scalar = double>
PolarHessian<Scalar> polar_hessian_exact(int q) {
  PolarHessian<Scalar> h;
  h.q = q;
  h.nn = detail::polar_critical_nn<Scalar>(q);
  h.B = Scalar(1) / (Scalar(2) * h.nn);
  h.Z = Scalar(0);
  h.M = Scalar(2) * h.nn;
  h.X = Scalar(2) * h.nn / Scalar(q - 1);
  h.eigenvalues = detail::polar_eigenvalues<Scalar>(q, h.B, h.M - h.X, h.M + Scalar(q - 1) * h.X);
  return h;
}

/// D^2 as a function of (NN, theta_1..theta_q) through the general Sigma contraction.
template <typename Scalar>
Scalar polar_distance_nn(const BasicTargetState<Scalar>& target, const VectorX<Scalar>& point) {
  const Scalar nn = point(0);
  std::vector<Scalar> thetas(point.data() + 1, point.data() + point.size());
  return polar_distance(std::sqrt(nn), sigma_entry<Scalar>(target, thetas));
}

template <typename Scalar>
VectorX<Scalar> polar_critical_point(int q) {
  VectorX<Scalar> point(q + 1);
  point(0) = detail::polar_critical_nn<Scalar>(q);
  point.tail(q).setConstant(std::acos(std::sqrt(Scalar(1) - Scalar(1) / Scalar(q))));
  return point;
}

/// Central-difference Hessian of polar_distance_nn for the single-excitation Dicke target.
template <typename Scalar = double>
MatrixX<Scalar> polar_hessian_numeric(int q, Scalar step = Scalar(1e-4)) {
  const BasicTargetState<Scalar> target = make_dicke<Scalar>(q, 1);
  const VectorX<Scalar> x0 = polar_critical_point<Scalar>(q);
  auto f = [&](const VectorX<Scalar>& x) { return polar_distance_nn(target, x); };
  const Eigen::Index n = x0.size();
  MatrixX<Scalar> h(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a; b < n; ++b) {
      VectorX<Scalar> ea = VectorX<Scalar>::Zero(n), eb = VectorX<Scalar>::Zero(n);
      ea(a) = step;
      eb(b) = step;
      const Scalar v = (f(x0 + ea + eb) - f(x0 + ea - eb) - f(x0 - ea + eb) + f(x0 - ea - eb)) /
                       (Scalar(4) * step * step);
      h(a, b) = h(b, a) = v;
    }
  }
  return h;
}

/// d2D^2/dNN^2 along the symmetric critical curve, assembled from the Cartesian
/// blocks of the single-excitation Dicke Hessian via the chain rule:
///   q [ a0'^2 (q (v2 g + tau) - v2 g) + 2 a0' a1' (q-1) g + a1'^2 (q (tau - v1 g) + v1 g) ]
/// with g = gamma01, a0' = d alpha0/dNN, a1' = d alpha1/dNN.
template <typename Scalar>
struct ChainRuleCheck {
  Scalar value;
  Scalar dAlpha0;
  Scalar dAlpha1;
  Scalar ratioResidual;  // |a0' - v1 a1'|
  Scalar normResidual;   // |a1'^-2 - 2 q^2 v1 (v1 - v2) tau NN| / a1'^-2
};

template <typename Scalar = double>
ChainRuleCheck<Scalar> polar_chain_rule(int q) {
  const Scalar nn = detail::polar_critical_nn<Scalar>(q);
  const DickeSolution<Scalar> sol = solve_dicke<Scalar>(q, 1);
  const SymmetricBlocks<Scalar> b = symmetric_blocks(make_dicke<Scalar>(q, 1), sol.params());
  const Scalar qq = Scalar(q);
  const Scalar common = std::pow(nn, Scalar(1) / (Scalar(2) * qq) - Scalar(1)) / (Scalar(2) * std::pow(qq, Scalar(1.5)));
  ChainRuleCheck<Scalar> c;
  c.dAlpha0 = std::sqrt(qq - 1) * common;
  c.dAlpha1 = common;
  const Scalar g = b.gamma01;
  c.value = qq * (c.dAlpha0 * c.dAlpha0 * (qq * (b.v2 * g + b.tau) - b.v2 * g) +
                  Scalar(2) * c.dAlpha0 * c.dAlpha1 * (qq - 1) * g +
                  c.dAlpha1 * c.dAlpha1 * (qq * (b.tau - b.v1 * g) + b.v1 * g));
  c.ratioResidual = std::abs(c.dAlpha0 - b.v1 * c.dAlpha1);
  const Scalar lhs = Scalar(1) / (c.dAlpha1 * c.dAlpha1);
  c.normResidual = std::abs(lhs - Scalar(2) * qq * qq * b.v1 * (b.v1 - b.v2) * b.tau * nn) / lhs;
  return c;
}

}  // namespace geoent
