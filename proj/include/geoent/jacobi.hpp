#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "geoent/states.hpp"

namespace geoent {

template <typename Scalar>
struct EigenDecomposition {
  VectorX<Scalar> values;   // ascending
  MatrixX<Scalar> vectors;  // orthonormal columns, vectors.col(k) pairs with values(k)
  int sweeps = 0;
};

/// Cyclic Jacobi rotations for a small dense symmetric matrix.
///
/// Converges when the largest off-diagonal magnitude drops below
/// 1e-14 * ||A||_F (or to exact zero for the zero matrix).
template <typename Scalar>
EigenDecomposition<Scalar> jacobi_eigen(const MatrixX<Scalar>& input, int maxSweeps = 100) {
  const Eigen::Index n = input.rows();
  if (input.cols() != n) throw DomainError("jacobi_eigen needs a square matrix");
  MatrixX<Scalar> a = input;
  MatrixX<Scalar> v = MatrixX<Scalar>::Identity(n, n);
  const Scalar tol = Scalar(1e-14) * a.norm();

  auto maxOffDiag = [&] {
    Scalar m(0);
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) m = std::max(m, std::abs(a(p, q)));
    return m;
  };

  int sweep = 0;
  for (; sweep <= maxSweeps; ++sweep) {
    if (maxOffDiag() <= tol) break;
    if (sweep == maxSweeps) throw NumericalError("Jacobi eigensolver did not converge", sweep);
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        if (apq == Scalar(0)) continue;
        const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * apq);
        const Scalar t = (theta >= 0 ? Scalar(1) : Scalar(-1)) /
                         (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
        const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
        const Scalar s = t * c;
        // A <- P^T A P with P the (p,q) plane rotation
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = Scalar(0);
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

  EigenDecomposition<Scalar> out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  out.sweeps = sweep;
  return out;
}

}  // namespace geoent
