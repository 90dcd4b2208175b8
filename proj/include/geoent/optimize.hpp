#pragma once

// Numerical search for stationary points of D^2. This is the independent
// oracle the closed-form solutions are checked against.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "geoent/distance.hpp"
#include "geoent/hessian.hpp"

namespace geoent {

struct OptimOptions {
  int maxIter = 500;
  double gradTol = 1e-9;  // on max |dD^2/dx|
  double stepInit = 1e-3; // initial damping, relative to trace(H) / dim
  std::vector<std::uint64_t> seedList;
  bool gaugeFix = true;
  int threads = 1;        // multistart workers; results do not depend on it

  void validate() const {
    if (maxIter < 1) throw DomainError("maxIter must be at least 1");
    if (!(gradTol > 0)) throw DomainError("gradTol must be positive");
    if (!(stepInit > 0)) throw DomainError("stepInit must be positive");
  }
};

inline constexpr std::uint64_t kDefaultSeed = 42;

// Consecutive seeds starting at `base`.
inline std::vector<std::uint64_t> seed_range(std::size_t n, std::uint64_t base = kDefaultSeed) {
  std::vector<std::uint64_t> seeds(n);
  for (std::size_t i = 0; i < n; ++i) seeds[i] = base + i;
  return seeds;
}

template <typename Scalar>
struct Extremum {
  BasicProductParams<Scalar> params;
  Scalar dsq;
  Scalar gradNorm;  // max-norm of the gradient at `params`
  int iters;
  bool converged;
};

/// Rescale pairs so every per-qubit norm equals (prod_t N_t)^(1/q); D^2 is unchanged.
template <typename Scalar>
BasicProductParams<Scalar> gauge_fix(const BasicProductParams<Scalar>& params) {
  params.require_nondegenerate();
  const int q = params.qubits();
  Scalar logSum(0);
  for (int t = 0; t < q; ++t) logSum += std::log(params.norm(t));
  const Scalar common = std::exp(logSum / Scalar(q));
  VectorX<Scalar> x = params.flat();
  for (int t = 0; t < q; ++t) x.template segment<2>(2 * t) *= std::sqrt(common / params.norm(t));
  return BasicProductParams<Scalar>(std::move(x));
}

namespace detail {

template <typename Scalar>
void require_finite(Scalar v, int iter, const char* what) {
  if (!std::isfinite(static_cast<double>(v)))
    throw NumericalError(std::string("non-finite ") + what + " at iteration " + std::to_string(iter), iter);
}

}  // namespace detail

/// Levenberg-damped Newton descent on D^2 with backtracking.
///
/// The step solves (H + mu I) d = -g with mu >= max(0, -lambda_min(H)) plus a
/// floor of 1e-10 trace(H), so every step is a descent direction and the gauge
/// zero modes of H never make the system singular. mu shrinks after a full
/// step and grows with the number of backtracking halvings otherwise.
template <typename Scalar>
Extremum<Scalar> minimize(const BasicTargetState<Scalar>& target, const BasicProductParams<Scalar>& init,
                          const OptimOptions& opts) {
  opts.validate();
  detail::check_dims(target, init);
  init.require_nondegenerate();

  const Eigen::Index n = init.flat().size();
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  VectorX<Scalar> x = init.flat();
  Scalar mu(-1);
  int iter = 0;

  auto evaluate = [&](const VectorX<Scalar>& at, Scalar& f, VectorX<Scalar>& g) {
    const BasicProductParams<Scalar> p(at);
    f = distance_value(target, p);
    g = gradient(target, p);
    detail::require_finite(f, iter, "distance");
    detail::require_finite(g.cwiseAbs().maxCoeff(), iter, "gradient");
  };

  Scalar f;
  VectorX<Scalar> g;
  bool converged = false;
  bool stuck = false;
  while (true) {
    evaluate(x, f, g);
    while (!(converged = g.cwiseAbs().maxCoeff() <= Scalar(opts.gradTol)) && iter < opts.maxIter && !stuck) {
      const BasicProductParams<Scalar> p(x);
      const MatrixX<Scalar> h = build_hessian(target, p);
      detail::require_finite(h.cwiseAbs().maxCoeff(), iter, "Hessian");
      const Scalar lmin = jacobi_eigen(h).values(0);
      const Scalar trace = std::abs(h.trace());
      const Scalar floor = Scalar(1e-10) * trace;
      if (mu < 0) mu = Scalar(opts.stepInit) * trace / Scalar(n);

      bool accepted = false;
      while (!accepted) {
        const Scalar shift = std::max(mu, floor) + std::max(Scalar(0), -lmin);
        const MatrixX<Scalar> damped = h + shift * MatrixX<Scalar>::Identity(n, n);
        const VectorX<Scalar> d = damped.ldlt().solve(-g);
        Scalar alpha(1);
        int halvings = 0;
        for (int k = 0; k < 30 && !accepted; ++k, alpha /= 2) {
          const VectorX<Scalar> xn = x + alpha * d;
          if (!xn.allFinite()) continue;
          const BasicProductParams<Scalar> pn(xn);
          if (pn.has_zero_pair()) continue;
          Scalar fn;
          VectorX<Scalar> gn;
          evaluate(xn, fn, gn);
          // Near convergence the decrease drops below rounding; accept a
          // step within that noise only if it shrinks the gradient.
          const bool decrease = fn < f;
          const bool flat = fn <= f + Scalar(8) * eps * std::max(Scalar(1), std::abs(f)) &&
                            gn.cwiseAbs().maxCoeff() < g.cwiseAbs().maxCoeff();
          if (decrease || flat) {
            x = xn;
            f = fn;
            g = gn;
            accepted = true;
            halvings = k;
          }
        }
        if (accepted) {
          // A step that needed backtracking means the damped model overshot.
          mu = halvings == 0 ? mu / 3 : std::max(mu, floor) * std::ldexp(Scalar(1), halvings);
        } else {
          mu = std::max(mu, floor) * 10;
          if (mu > Scalar(1e20) * (trace + 1)) {
            stuck = true;
            break;
          }
        }
      }
      ++iter;
    }
    if (!opts.gaugeFix) break;
    x = gauge_fix(BasicProductParams<Scalar>(x)).flat();
    evaluate(x, f, g);
    converged = g.cwiseAbs().maxCoeff() <= Scalar(opts.gradTol);
    // Rebalancing rescales the gradient; polish again if that pushed it over.
    if (converged || iter >= opts.maxIter || stuck) break;
  }

  return Extremum<Scalar>{BasicProductParams<Scalar>(x), f, g.cwiseAbs().maxCoeff(), iter, converged};
}

/// Random initial pairs, uniform on [-1,1]^2, resampled while |pair| < 1e-3.
template <typename Scalar = double>
BasicProductParams<Scalar> random_start(int q, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  VectorX<Scalar> x(2 * q);
  for (int t = 0; t < q; ++t) {
    double a, b;
    do {
      a = dist(rng);
      b = dist(rng);
    } while (std::hypot(a, b) < 1e-3);
    x(2 * t) = Scalar(a);
    x(2 * t + 1) = Scalar(b);
  }
  return BasicProductParams<Scalar>(std::move(x));
}

/// Every multistart run in seed order; a run that hit a numerical failure is empty.
template <typename Scalar>
std::vector<std::optional<Extremum<Scalar>>> multistart_runs(const BasicTargetState<Scalar>& target, int nStarts,
                                                             const OptimOptions& opts) {
  opts.validate();
  if (nStarts < 1) throw DomainError("multistart needs at least one start");
  if (static_cast<int>(opts.seedList.size()) < nStarts)
    throw DomainError("seedList supplies " + std::to_string(opts.seedList.size()) + " seeds for " +
                      std::to_string(nStarts) + " starts");

  std::vector<std::optional<Extremum<Scalar>>> runs(static_cast<std::size_t>(nStarts));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < nStarts; k = next++) {
      try {
        runs[k] = minimize(target, random_start<Scalar>(target.qubits(), opts.seedList[k]), opts);
      } catch (const NumericalError&) {
        runs[k].reset();
      }
    }
  };
  const int threads = std::clamp(opts.threads, 1, nStarts);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return runs;
}

/// Converged run with the smallest D^2; ties go to the earlier seed.
template <typename Scalar>
Extremum<Scalar> multistart(const BasicTargetState<Scalar>& target, int nStarts, const OptimOptions& opts) {
  const auto runs = multistart_runs(target, nStarts, opts);
  const Extremum<Scalar>* best = nullptr;
  for (const auto& r : runs)
    if (r && r->converged && (best == nullptr || r->dsq < best->dsq)) best = &*r;
  if (best == nullptr)
    throw NumericalError("none of the " + std::to_string(nStarts) + " multistart runs converged");
  return *best;
}

}  // namespace geoent
