#pragma once

// Target states, product-state parameters and the dense tensor contractions
// shared by every other module.
//
// Index convention: a flat index encodes qubit t (0-based) in bit (q-1-t), so
// qubit 0 is the most significant bit and |i j k ...> reads left to right.

#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geoent/errors.hpp"

namespace geoent {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Pair = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

// Dense storage ceiling; 2^20 doubles is 8 MiB per state.
inline constexpr int kMaxQubits = 20;

inline Eigen::Index basis_dim(int q) { return Eigen::Index{1} << q; }

inline int qubit_bit(std::uint64_t index, int q, int t) {
  return static_cast<int>((index >> (q - 1 - t)) & 1u);
}

inline void check_qubit_count(int q, int minimum = 2) {
  if (q < minimum)
    throw DomainError("qubit count " + std::to_string(q) + " is below the minimum of " +
                      std::to_string(minimum));
  if (q > kMaxQubits)
    throw DomainError("qubit count " + std::to_string(q) + " exceeds the dense-storage limit of " +
                      std::to_string(kMaxQubits));
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

/// Normalized real pure state of q qubits, stored densely as 2^q coefficients.
template <typename Scalar>
class BasicTargetState {
 public:
  BasicTargetState(int q, VectorX<Scalar> coeffs, Scalar normTol = Scalar(1e-12))
      : q_(q), coeffs_(std::move(coeffs)) {
    check_qubit_count(q_);
    if (coeffs_.size() != basis_dim(q_))
      throw DomainError("target state needs 2^" + std::to_string(q_) + " coefficients, got " +
                        std::to_string(coeffs_.size()));
    if (!coeffs_.allFinite()) throw DomainError("target state has non-finite coefficients");
    const Scalar dev = std::abs(coeffs_.squaredNorm() - Scalar(1));
    if (dev > normTol) throw DomainError("target state is not normalized");
  }

  int qubits() const noexcept { return q_; }
  Eigen::Index dim() const noexcept { return coeffs_.size(); }
  const VectorX<Scalar>& coeffs() const noexcept { return coeffs_; }
  Scalar operator()(Eigen::Index i) const { return coeffs_(i); }

 private:
  int q_;
  VectorX<Scalar> coeffs_;
};

/// Unnormalized product state: q real pairs (x0, x1), flattened as (a0,a1,b0,b1,...).
///
/// Operations that divide by or differentiate through per-qubit norms call
/// require_nondegenerate(); distance_sq alone accepts a vanishing pair.
template <typename Scalar>
class BasicProductParams {
 public:
  explicit BasicProductParams(VectorX<Scalar> flat) : flat_(std::move(flat)) {
    if (flat_.size() < 2 || flat_.size() % 2 != 0)
      throw DomainError("product parameters need an even, positive number of entries");
    check_qubit_count(qubits(), 1);
    if (!flat_.allFinite()) throw DomainError("product parameters contain non-finite values");
  }

  static BasicProductParams from_pairs(std::span<const std::array<Scalar, 2>> pairs) {
    VectorX<Scalar> flat(2 * static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t t = 0; t < pairs.size(); ++t) {
      flat(2 * t) = pairs[t][0];
      flat(2 * t + 1) = pairs[t][1];
    }
    return BasicProductParams(std::move(flat));
  }
  static BasicProductParams from_pairs(std::initializer_list<std::array<Scalar, 2>> pairs) {
    return from_pairs(std::span<const std::array<Scalar, 2>>(pairs.begin(), pairs.size()));
  }

  int qubits() const noexcept { return static_cast<int>(flat_.size() / 2); }
  const VectorX<Scalar>& flat() const noexcept { return flat_; }
  Pair<Scalar> pair(int t) const { return flat_.template segment<2>(2 * t); }

  // N_t = x0^2 + x1^2
  Scalar norm(int t) const { return flat_.template segment<2>(2 * t).squaredNorm(); }

  Scalar norm_product() const { return norm_product_except(-1, -1); }

  Scalar norm_product_except(int s, int t = -1) const {
    Scalar prod(1);
    for (int u = 0; u < qubits(); ++u)
      if (u != s && u != t) prod *= norm(u);
    return prod;
  }

  bool has_zero_pair() const {
    for (int t = 0; t < qubits(); ++t)
      if (norm(t) == Scalar(0)) return true;
    return false;
  }

  void require_nondegenerate() const {
    if (has_zero_pair()) throw DomainError("product parameters have a zero qubit pair");
  }

 private:
  VectorX<Scalar> flat_;
};

/// Permutation-invariant product state: every qubit carries (alpha0, alpha1).
template <typename Scalar>
struct BasicSymmetricParams {
  int q;
  Scalar alpha0;
  Scalar alpha1;

  BasicSymmetricParams(int q_, Scalar a0, Scalar a1) : q(q_), alpha0(a0), alpha1(a1) {
    check_qubit_count(q, 1);
    if (!(norm() > Scalar(0))) throw DomainError("symmetric parameters need alpha0^2 + alpha1^2 > 0");
  }

  Scalar norm() const { return alpha0 * alpha0 + alpha1 * alpha1; }
};

using TargetState = BasicTargetState<double>;
using ProductParams = BasicProductParams<double>;
using SymmetricParams = BasicSymmetricParams<double>;

struct DickeSpec {
  int q;
  int p;
  double normFactor;  // 1 / sqrt(C(q, p))
};

inline DickeSpec dicke_spec(int q, int p) {
  check_qubit_count(q);
  if (p < 0 || p > q)
    throw DomainError("excitation count p=" + std::to_string(p) + " outside [0, " + std::to_string(q) + "]");
  return {q, p, 1.0 / std::sqrt(binomial(q, p))};
}

template <typename Scalar = double>
BasicTargetState<Scalar> make_dicke(int q, int p) {
  const DickeSpec spec = dicke_spec(q, p);
  VectorX<Scalar> c = VectorX<Scalar>::Zero(basis_dim(q));
  const Scalar amp = Scalar(1) / std::sqrt(Scalar(binomial(q, p)));
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (std::popcount(static_cast<std::uint64_t>(i)) == spec.p) c(i) = amp;
  return BasicTargetState<Scalar>(q, std::move(c));
}

/// Two adjacent excitations on a periodic chain: 1100..0, 0110..0, ..., 10..01.
template <typename Scalar = double>
BasicTargetState<Scalar> make_ring(int q) {
  check_qubit_count(q, 3);
  VectorX<Scalar> c = VectorX<Scalar>::Zero(basis_dim(q));
  const Scalar amp = Scalar(1) / std::sqrt(Scalar(q));
  for (int s = 0; s < q; ++s) {
    const int t = (s + 1) % q;
    const std::uint64_t idx = (std::uint64_t{1} << (q - 1 - s)) | (std::uint64_t{1} << (q - 1 - t));
    c(static_cast<Eigen::Index>(idx)) = amp;
  }
  return BasicTargetState<Scalar>(q, std::move(c));
}

template <typename Scalar>
BasicProductParams<Scalar> embed_symmetric(const BasicSymmetricParams<Scalar>& s) {
  VectorX<Scalar> flat(2 * s.q);
  for (int t = 0; t < s.q; ++t) {
    flat(2 * t) = s.alpha0;
    flat(2 * t + 1) = s.alpha1;
  }
  return BasicProductParams<Scalar>(std::move(flat));
}

/// phi_{ijk...} = a_i b_j c_k ...
template <typename Scalar>
VectorX<Scalar> product_coeffs(const BasicProductParams<Scalar>& params) {
  VectorX<Scalar> phi(1);
  phi(0) = Scalar(1);
  for (int t = 0; t < params.qubits(); ++t) {
    VectorX<Scalar> next(2 * phi.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
      next(2 * i) = phi(i) * params.flat()(2 * t);
      next(2 * i + 1) = phi(i) * params.flat()(2 * t + 1);
    }
    phi.swap(next);
  }
  return phi;
}

/// Contract a q-qubit tensor with the product-state pair of every qubit not
/// listed in `keep`. The result is a tensor over the kept qubits, MSB-first in
/// ascending qubit order (size 2^|keep|). With `keep` empty this is <tensor|phi>.
template <typename Scalar>
VectorX<Scalar> contract_except(const VectorX<Scalar>& tensor, int q,
                                const BasicProductParams<Scalar>& params,
                                std::span<const int> keep = {}) {
  if (tensor.size() != basis_dim(q) || params.qubits() != q)
    throw DomainError("contraction shape mismatch");
  auto kept = [&](int t) {
    for (int k : keep)
      if (k == t) return true;
    return false;
  };

  using Strided = Eigen::Map<const MatrixX<Scalar>, 0, Eigen::OuterStride<>>;
  VectorX<Scalar> cur = tensor;
  int keptAbove = 0;
  // Contract the highest qubit first so lower qubits keep their bit positions.
  for (int t = q - 1; t >= 0; --t) {
    if (kept(t)) {
      ++keptAbove;
      continue;
    }
    const Eigen::Index low = Eigen::Index{1} << keptAbove;
    const Eigen::Index high = cur.size() / (2 * low);
    Strided bit0(cur.data(), low, high, Eigen::OuterStride<>(2 * low));
    Strided bit1(cur.data() + low, low, high, Eigen::OuterStride<>(2 * low));
    MatrixX<Scalar> next = params.flat()(2 * t) * bit0 + params.flat()(2 * t + 1) * bit1;
    cur = Eigen::Map<VectorX<Scalar>>(next.data(), next.size());
  }
  return cur;
}

template <typename Scalar>
VectorX<Scalar> contract_except(const VectorX<Scalar>& tensor, int q,
                                const BasicProductParams<Scalar>& params,
                                std::initializer_list<int> keep) {
  return contract_except(tensor, q, params, std::span<const int>(keep.begin(), keep.size()));
}

/// Apply a 2x2 matrix to each qubit axis: out_{i j ...} = M0_{i x} M1_{j y} ... in_{x y ...}.
template <typename Scalar>
VectorX<Scalar> apply_local(const VectorX<Scalar>& tensor, int q, std::span<const Matrix2<Scalar>> ops) {
  if (tensor.size() != basis_dim(q) || static_cast<int>(ops.size()) != q)
    throw DomainError("local operator shape mismatch");
  using Strided = Eigen::Map<MatrixX<Scalar>, 0, Eigen::OuterStride<>>;
  VectorX<Scalar> cur = tensor;
  VectorX<Scalar> out(cur.size());
  for (int t = 0; t < q; ++t) {
    const Eigen::Index low = Eigen::Index{1} << (q - 1 - t);
    const Eigen::Index high = Eigen::Index{1} << t;
    Strided in0(cur.data(), low, high, Eigen::OuterStride<>(2 * low));
    Strided in1(cur.data() + low, low, high, Eigen::OuterStride<>(2 * low));
    Strided out0(out.data(), low, high, Eigen::OuterStride<>(2 * low));
    Strided out1(out.data() + low, low, high, Eigen::OuterStride<>(2 * low));
    const Matrix2<Scalar>& m = ops[t];
    out0 = m(0, 0) * in0 + m(0, 1) * in1;
    out1 = m(1, 0) * in0 + m(1, 1) * in1;
    cur.swap(out);
  }
  return cur;
}

/// Relabel qubit axes: the axis of qubit t moves to position perm[t].
template <typename Scalar>
VectorX<Scalar> permute_qubits(const VectorX<Scalar>& tensor, int q, std::span<const int> perm) {
  if (tensor.size() != basis_dim(q) || static_cast<int>(perm.size()) != q)
    throw DomainError("permutation shape mismatch");
  VectorX<Scalar> out(tensor.size());
  for (Eigen::Index i = 0; i < tensor.size(); ++i) {
    std::uint64_t j = 0;
    for (int t = 0; t < q; ++t)
      if (qubit_bit(static_cast<std::uint64_t>(i), q, t)) j |= std::uint64_t{1} << (q - 1 - perm[t]);
    out(static_cast<Eigen::Index>(j)) = tensor(i);
  }
  return out;
}

template <typename Scalar>
bool is_permutation_invariant(const BasicTargetState<Scalar>& target, Scalar tol = Scalar(1e-12)) {
  // Adjacent transpositions generate the symmetric group.
  const int q = target.qubits();
  std::vector<int> perm(q);
  for (int s = 0; s + 1 < q; ++s) {
    std::iota(perm.begin(), perm.end(), 0);
    std::swap(perm[s], perm[s + 1]);
    if ((permute_qubits<Scalar>(target.coeffs(), q, perm) - target.coeffs()).cwiseAbs().maxCoeff() > tol)
      return false;
  }
  return true;
}

}  // namespace geoent
