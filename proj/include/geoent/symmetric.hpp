#pragma once

// Closed-form symmetric stationary points: Dicke-type targets (a local
// minimum) and the cyclic ring target (stationary, not a minimum).

#include <algorithm>
#include <cmath>
#include <string>

#include "geoent/states.hpp"

namespace geoent {

/// Spectrum of the symmetric block Hessian, one entry per eigen family.
template <typename Scalar>
struct FamilySpectrum {
  Scalar e1;  // global scaling, q tau, multiplicity 1
  Scalar e2;  // gauge, 0, multiplicity q-1
  Scalar e3;  // relative rotations, multiplicity q-1
  Scalar e4;  // global rotation, multiplicity 1
};

template <typename Scalar>
struct DickeSolution {
  int q;
  int p;
  Scalar alpha0;
  Scalar alpha1;
  Scalar N;          // alpha0^2 + alpha1^2
  Scalar X, Y, Z, W; // exponents of the power-law form of alpha0^2, alpha1^2
  Scalar ratioA0A1;  // sqrt((q-p)/p)
  Scalar nToQ;       // N^q = C(q,p) (p/q)^p (1-p/q)^(q-p)
  Scalar dcSquared;  // 1 - N^q
  Scalar tau;        // 2 N^(q-1)
  Scalar gamma01;
  FamilySpectrum<Scalar> spectrum;
  Scalar powerLawResidual;  // max relative deviation of the power-law alpha^2 from the solution

  BasicSymmetricParams<Scalar> params() const { return {q, alpha0, alpha1}; }
};

namespace detail {

inline void check_dicke_range(int q, int p) {
  if (q < 3) throw DomainError("closed-form Dicke solution needs q >= 3, got " + std::to_string(q));
  check_qubit_count(q);
  if (p < 1 || p > q - 1)
    throw DomainError("closed-form Dicke solution needs 1 <= p <= q-1, got p=" + std::to_string(p));
}

template <typename Scalar>
Scalar log_binomial(int n, int k) {
  return std::lgamma(Scalar(n + 1)) - std::lgamma(Scalar(k + 1)) - std::lgamma(Scalar(n - k + 1));
}

}  // namespace detail

/// N^q = C(q,p) (p/q)^p (1 - p/q)^(q-p), evaluated in log space.
template <typename Scalar = double>
Scalar dicke_n_to_q(int q, int p) {
  detail::check_dicke_range(q, p);
  const Scalar frac = Scalar(p) / Scalar(q);
  return std::exp(detail::log_binomial<Scalar>(q, p) + Scalar(p) * std::log(frac) +
                  Scalar(q - p) * std::log1p(-frac));
}

/// alpha0, alpha1 are built from the ratio sqrt((q-p)/p) and N = (N^q)^(1/q);
/// the power-law form with exponents X..W is kept as a post-check.
template <typename Scalar = double>
DickeSolution<Scalar> solve_dicke(int q, int p) {
  detail::check_dicke_range(q, p);
  DickeSolution<Scalar> s;
  s.q = q;
  s.p = p;
  s.nToQ = dicke_n_to_q<Scalar>(q, p);
  s.N = std::pow(s.nToQ, Scalar(1) / Scalar(q));
  s.ratioA0A1 = std::sqrt(Scalar(q - p) / Scalar(p));
  s.alpha1 = std::sqrt(s.N / (Scalar(1) + s.ratioA0A1 * s.ratioA0A1));
  s.alpha0 = s.ratioA0A1 * s.alpha1;
  s.dcSquared = Scalar(1) - s.nToQ;
  s.tau = Scalar(2) * std::pow(s.N, q - 1);
  s.gamma01 = Scalar(4) * s.alpha0 * s.alpha1 * std::pow(s.N, q - 2) -
              Scalar(2) * std::sqrt(Scalar((q - p) * p)) / Scalar(q - 1) * std::pow(s.N, q - 1);
  s.spectrum = {Scalar(q) * s.tau, Scalar(0), s.tau * (Scalar(1) - Scalar(1) / Scalar(q - 1)), Scalar(2) * s.tau};

  s.X = Scalar(2) + Scalar(2) / Scalar(q - 2);
  s.Y = Scalar(p - q) / Scalar(q - 2);
  s.Z = Scalar(p - 1) / Scalar(q - 2);
  s.W = Scalar(1) / Scalar(2 - q);
  const Scalar c = Scalar(binomial(q - 1, p - 1));
  const Scalar a0sq = std::pow(s.N, s.X) * std::pow(Scalar(q - p) / Scalar(q), s.Y + 1) *
                      std::pow(Scalar(q) / Scalar(p), s.Z) * std::pow(c, s.W);
  const Scalar a1sq = std::pow(s.N, s.X) * std::pow(Scalar(q - p) / Scalar(q), s.Y) *
                      std::pow(Scalar(q) / Scalar(p), s.Z - 1) * std::pow(c, s.W);
  s.powerLawResidual = std::max(std::abs(a0sq / (s.alpha0 * s.alpha0) - Scalar(1)),
                                std::abs(a1sq / (s.alpha1 * s.alpha1) - Scalar(1)));
  if (s.powerLawResidual > Scalar(1e-10))
    throw NumericalError("Dicke solution fails its power-law post-check");
  return s;
}

/// Symmetric stationary point of the ring target. The spectrum fields are the
/// values the uniform-block formulas give; the ring Hessian is not uniform
/// across qubit pairs, so build_hessian is the authority on its true spectrum.
template <typename Scalar>
struct RingSolution {
  int q;
  Scalar alpha0;   // alpha0^2 = N (q-2)/q
  Scalar alpha1;   // alpha1^2 = 2N/q
  Scalar N;
  Scalar nToQ;     // (4/q) ((q-2)/q)^(q-2)
  Scalar dsq;      // 1 - N^q at the symmetric point
  Scalar tau;
  Scalar gamma01;  // adjacent-pair value 4 a0 a1 N^(q-2) - sqrt(2/(q-2)) N^(q-1)
  FamilySpectrum<Scalar> uniformBlockSpectrum;
  Scalar stationarityResidual;  // |N^(q-1) - (2/sqrt(q)) alpha0^(q-2)| / N^(q-1)

  BasicSymmetricParams<Scalar> params() const { return {q, alpha0, alpha1}; }
};

template <typename Scalar = double>
RingSolution<Scalar> solve_ring(int q) {
  if (q < 3) throw DomainError("ring solution needs q >= 3, got " + std::to_string(q));
  check_qubit_count(q);
  RingSolution<Scalar> r;
  r.q = q;
  // N^(q-1) = (2/sqrt q) alpha0^(q-2) with alpha0^2 = N (q-2)/q  =>  N^(q/2) = (2/sqrt q) ((q-2)/q)^((q-2)/2)
  const Scalar frac = Scalar(q - 2) / Scalar(q);
  const Scalar logN = (std::log(Scalar(2)) - Scalar(0.5) * std::log(Scalar(q)) +
                       Scalar(0.5) * Scalar(q - 2) * std::log(frac)) * Scalar(2) / Scalar(q);
  r.N = std::exp(logN);
  r.nToQ = std::exp(Scalar(q) * logN);
  r.alpha0 = std::sqrt(r.N * frac);
  r.alpha1 = std::sqrt(Scalar(2) * r.N / Scalar(q));
  r.dsq = Scalar(1) - r.nToQ;
  r.tau = Scalar(2) * std::pow(r.N, q - 1);
  r.gamma01 = Scalar(4) * r.alpha0 * r.alpha1 * std::pow(r.N, q - 2) -
              std::sqrt(Scalar(2) / Scalar(q - 2)) * std::pow(r.N, q - 1);
  const Scalar qq = Scalar(q);
  r.uniformBlockSpectrum = {qq * r.tau, Scalar(0), r.tau * (Scalar(2) - qq / (Scalar(2) * (qq - 2))),
                     -r.tau * (qq * qq - 7 * qq + 8) / (Scalar(2) * (qq - 2))};
  const Scalar lhs = std::pow(r.N, q - 1);
  r.stationarityResidual = std::abs(lhs - Scalar(2) / std::sqrt(qq) * std::pow(r.alpha0, q - 2)) / lhs;
  if (r.stationarityResidual > Scalar(1e-12)) throw NumericalError("ring solution fails its stationarity check");
  return r;
}

}  // namespace geoent
