#pragma once

// Squared distance between a target state and an unnormalized product state,
// its gradient, and the identities that hold at critical points.

#include <cmath>

#include "geoent/states.hpp"

namespace geoent {

template <typename Scalar>
struct DistanceReport {
  Scalar dsq;            // D^2 = 1 - 2 <psi|phi> + <phi|phi>
  VectorX<Scalar> grad;  // dD^2/dx in (a0,a1,b0,b1,...) order
  Scalar overlap;        // <psi|phi>
  Scalar prodNorm;       // <phi|phi> = prod_t N_t
};

namespace detail {

template <typename Scalar>
void check_dims(const BasicTargetState<Scalar>& target, const BasicProductParams<Scalar>& params) {
  if (target.qubits() != params.qubits())
    throw DomainError("target has " + std::to_string(target.qubits()) + " qubits, parameters have " +
                      std::to_string(params.qubits()));
}

// env_t(i) = sum chi_{..i..} prod_{s != t} x_s, the target contracted with every pair but qubit t's.
template <typename Scalar>
Pair<Scalar> environment(const BasicTargetState<Scalar>& target, const BasicProductParams<Scalar>& params,
                         int t) {
  const int keep[1] = {t};
  VectorX<Scalar> e = contract_except(target.coeffs(), target.qubits(), params, std::span<const int>(keep));
  return Pair<Scalar>(e(0), e(1));
}

}  // namespace detail

template <typename Scalar>
VectorX<Scalar> gradient(const BasicTargetState<Scalar>& target, const BasicProductParams<Scalar>& params) {
  detail::check_dims(target, params);
  const int q = params.qubits();
  VectorX<Scalar> g(2 * q);
  for (int t = 0; t < q; ++t) {
    const Pair<Scalar> env = detail::environment(target, params, t);
    g.template segment<2>(2 * t) = Scalar(2) * (params.pair(t) * params.norm_product_except(t) - env);
  }
  return g;
}

template <typename Scalar>
DistanceReport<Scalar> distance_sq(const BasicTargetState<Scalar>& target,
                                   const BasicProductParams<Scalar>& params) {
  detail::check_dims(target, params);
  if (params.flat().isZero(0)) throw DomainError("all product parameters are zero");
  DistanceReport<Scalar> r;
  r.grad = gradient(target, params);
  r.overlap = contract_except(target.coeffs(), target.qubits(), params)(0);
  r.prodNorm = params.norm_product();
  r.dsq = Scalar(1) - Scalar(2) * r.overlap + r.prodNorm;
  return r;
}

// D^2 only, no gradient; used by line searches and finite-difference checks.
template <typename Scalar>
Scalar distance_value(const BasicTargetState<Scalar>& target, const BasicProductParams<Scalar>& params) {
  detail::check_dims(target, params);
  const Scalar overlap = contract_except(target.coeffs(), target.qubits(), params)(0);
  return Scalar(1) - Scalar(2) * overlap + params.norm_product();
}

template <typename Scalar>
struct CriticalIdentities {
  Scalar dcSquared;    // 1 - prod_t N_t
  Scalar cdResidual;   // |D^2 - (1 - prod_t N_t)|
  Scalar cosThetaC;    // <psi|phi> / sqrt(<phi|phi>)
  Scalar dNsq;         // 2 D^2, the normalized-measure convention
  Scalar gradMaxNorm;
  bool stationary;     // gradMaxNorm <= the caller's tolerance; identities only hold when true
};

template <typename Scalar>
CriticalIdentities<Scalar> critical_identities(const BasicTargetState<Scalar>& target,
                                               const BasicProductParams<Scalar>& params,
                                               Scalar stationaryTol = Scalar(1e-9)) {
  params.require_nondegenerate();
  const DistanceReport<Scalar> d = distance_sq(target, params);
  CriticalIdentities<Scalar> c;
  c.dcSquared = Scalar(1) - d.prodNorm;
  c.cdResidual = std::abs(d.dsq - c.dcSquared);
  c.cosThetaC = d.overlap / std::sqrt(d.prodNorm);
  c.dNsq = Scalar(2) * d.dsq;
  c.gradMaxNorm = d.grad.cwiseAbs().maxCoeff();
  c.stationary = c.gradMaxNorm <= stationaryTol;
  return c;
}

}  // namespace geoent
