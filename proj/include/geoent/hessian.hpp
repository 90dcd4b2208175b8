#pragma once

// Exact Hessian of D^2 over the 2q product-state parameters, the block form it
// takes for permutation-invariant targets at symmetric points, its closed-form
// eigen-system, and numeric classification of critical points.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "geoent/distance.hpp"
#include "geoent/jacobi.hpp"

namespace geoent {

/// Rows/columns ordered (a0,a1,b0,b1,...).
///   d2/dx_si^2         = 2 prod_{u!=s} N_u
///   d2/dx_s0 dx_s1     = 0
///   d2/dx_si dx_tj     = 4 x_si x_tj prod_{u!=s,t} N_u - 2 sum chi_{..i..j..} prod_{u!=s,t} x_u
template <typename Scalar>
MatrixX<Scalar> build_hessian(const BasicTargetState<Scalar>& target, const BasicProductParams<Scalar>& params) {
  detail::check_dims(target, params);
  const int q = params.qubits();
  const VectorX<Scalar>& x = params.flat();
  MatrixX<Scalar> h = MatrixX<Scalar>::Zero(2 * q, 2 * q);
  for (int s = 0; s < q; ++s) {
    const Scalar diag = Scalar(2) * params.norm_product_except(s);
    h(2 * s, 2 * s) = diag;
    h(2 * s + 1, 2 * s + 1) = diag;
    for (int t = s + 1; t < q; ++t) {
      const int keep[2] = {s, t};
      const VectorX<Scalar> env = contract_except(target.coeffs(), q, params, std::span<const int>(keep));
      const Scalar rest = params.norm_product_except(s, t);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const Scalar g = Scalar(4) * x(2 * s + i) * x(2 * t + j) * rest - Scalar(2) * env(2 * i + j);
          h(2 * s + i, 2 * t + j) = g;
          h(2 * t + j, 2 * s + i) = g;
        }
    }
  }
  return h;
}

/// Hessian blocks at a symmetric point of a permutation-invariant target.
template <typename Scalar>
struct SymmetricBlocks {
  Scalar tau;      // 2 N^(q-1)
  Scalar gamma00;
  Scalar gamma01;
  Scalar gamma10;
  Scalar gamma11;
  Scalar v1;       // (tau - gamma11) / gamma01
  Scalar v2;       // (gamma00 - tau) / gamma01
  Scalar gradMaxNorm;
  bool onShell;    // stationary and v1 v2 = -1; the closed-form eigen-system needs this
};

template <typename Scalar>
SymmetricBlocks<Scalar> symmetric_blocks(const BasicTargetState<Scalar>& target, const BasicSymmetricParams<Scalar>& s,
                                         Scalar stationaryTol = Scalar(1e-9)) {
  if (target.qubits() != s.q) throw DomainError("symmetric_blocks: qubit count mismatch");
  if (s.q < 2) throw DomainError("symmetric_blocks needs at least two qubits");
  if (!is_permutation_invariant(target)) throw SymmetryError("target is not invariant under qubit transpositions");

  const BasicProductParams<Scalar> params = embed_symmetric(s);
  const int q = s.q;
  const Scalar n = s.norm();
  const Scalar a[2] = {s.alpha0, s.alpha1};
  const int keep[2] = {0, 1};
  const VectorX<Scalar> env = contract_except(target.coeffs(), q, params, std::span<const int>(keep));
  auto gamma = [&](int i, int j) {
    return Scalar(4) * a[i] * a[j] * std::pow(n, q - 2) - Scalar(2) * env(2 * i + j);
  };

  SymmetricBlocks<Scalar> b;
  b.tau = Scalar(2) * std::pow(n, q - 1);
  b.gamma00 = gamma(0, 0);
  b.gamma01 = gamma(0, 1);
  b.gamma10 = gamma(1, 0);
  b.gamma11 = gamma(1, 1);
  const Scalar scale = std::max({std::abs(b.gamma01), std::abs(b.gamma10), b.tau});
  if (std::abs(b.gamma01 - b.gamma10) > Scalar(1e-12) * scale)
    throw SymmetryError("gamma01 != gamma10 at the supplied point");
  if (b.gamma01 == Scalar(0)) throw DomainError("gamma01 vanishes; v1 and v2 are undefined");
  b.v1 = (b.tau - b.gamma11) / b.gamma01;
  b.v2 = (b.gamma00 - b.tau) / b.gamma01;
  b.gradMaxNorm = gradient(target, params).cwiseAbs().maxCoeff();
  b.onShell = b.gradMaxNorm <= stationaryTol && std::abs(b.v1 * b.v2 + Scalar(1)) <= Scalar(1e-8);
  return b;
}

/// Block matrix with T on the diagonal and Gamma = M + T everywhere else.
template <typename Scalar>
MatrixX<Scalar> hessian_from_blocks(int q, const SymmetricBlocks<Scalar>& b) {
  Matrix2<Scalar> t = Matrix2<Scalar>::Identity() * b.tau;
  Matrix2<Scalar> gamma;
  gamma << b.gamma00, b.gamma01, b.gamma10, b.gamma11;
  MatrixX<Scalar> h(2 * q, 2 * q);
  for (int s = 0; s < q; ++s)
    for (int u = 0; u < q; ++u) h.template block<2, 2>(2 * s, 2 * u) = (s == u) ? t : gamma;
  return h;
}

enum class EigenFamily { GlobalScaling, GaugeScaling, RelativeRotation, GlobalRotation };

template <typename Scalar>
struct AnalyticEigenpair {
  Scalar value;
  VectorX<Scalar> vector;  // unit norm
  EigenFamily family;
};

/// Closed-form eigen-system of the symmetric block Hessian (needs v1 v2 = -1):
///   V1            (v1,1) on every qubit                       q tau
///   V2..Vq        (-v1,-1) on qubit 0, (v1,1) on qubit k       0
///   V(q+1)..      (-v2,-1) on qubit 0, (v2,1) on qubit k       gamma01 (v1 - v2)
///   V2q           (v2,1) on every qubit                       q tau - (q-1) gamma01 (v1 - v2)
/// Degenerate families are Gram-Schmidt orthonormalized, first vector kept.
template <typename Scalar>
std::vector<AnalyticEigenpair<Scalar>> analytic_eigenpairs(int q, const SymmetricBlocks<Scalar>& b) {
  if (q < 2) throw DomainError("analytic_eigenpairs needs at least two qubits");
  if (std::abs(b.v1 * b.v2 + Scalar(1)) > Scalar(1e-8))
    throw DomainError("blocks are off-shell: v1 v2 deviates from -1");

  const Scalar split = b.gamma01 * (b.v1 - b.v2);
  auto uniform = [&](Scalar v) {
    VectorX<Scalar> out(2 * q);
    for (int t = 0; t < q; ++t) out.template segment<2>(2 * t) << v, Scalar(1);
    return out;
  };
  auto relative = [&](Scalar v, int k) {
    VectorX<Scalar> out = VectorX<Scalar>::Zero(2 * q);
    out.template segment<2>(0) << -v, Scalar(-1);
    out.template segment<2>(2 * k) << v, Scalar(1);
    return out;
  };
  auto orthonormalize = [](std::vector<VectorX<Scalar>>& family) {
    for (std::size_t i = 0; i < family.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) family[i] -= family[j].dot(family[i]) * family[j];
      family[i].normalize();
    }
  };

  std::vector<VectorX<Scalar>> gauge, rotation;
  for (int k = 1; k < q; ++k) {
    gauge.push_back(relative(b.v1, k));
    rotation.push_back(relative(b.v2, k));
  }
  orthonormalize(gauge);
  orthonormalize(rotation);

  std::vector<AnalyticEigenpair<Scalar>> pairs;
  pairs.push_back({Scalar(q) * b.tau, uniform(b.v1).normalized(), EigenFamily::GlobalScaling});
  for (auto& v : gauge) pairs.push_back({Scalar(0), std::move(v), EigenFamily::GaugeScaling});
  for (auto& v : rotation) pairs.push_back({split, std::move(v), EigenFamily::RelativeRotation});
  pairs.push_back({Scalar(q) * b.tau - Scalar(q - 1) * split, uniform(b.v2).normalized(), EigenFamily::GlobalRotation});
  return pairs;
}

/// The q-1 compensating-rescaling directions: shrink qubit 0, grow qubit k.
/// Columns are (-x_0 on qubit 0, x_k on qubit k), tangent to D^2's level set.
template <typename Scalar>
MatrixX<Scalar> gauge_directions(const BasicProductParams<Scalar>& params) {
  const int q = params.qubits();
  MatrixX<Scalar> g = MatrixX<Scalar>::Zero(2 * q, q - 1);
  for (int k = 1; k < q; ++k) {
    g.template block<2, 1>(0, k - 1) = -params.pair(0);
    g.template block<2, 1>(2 * k, k - 1) = params.pair(k);
  }
  return g;
}

enum class Classification { LocalMinimum, Saddle, DegenerateNeedsHigherOrder };

inline std::string to_string(Classification c) {
  switch (c) {
    case Classification::LocalMinimum: return "local-minimum";
    case Classification::Saddle: return "saddle";
    case Classification::DegenerateNeedsHigherOrder: return "degenerate-needs-higher-order";
  }
  return "unknown";
}

inline Classification classification_from_string(const std::string& s) {
  if (s == "local-minimum") return Classification::LocalMinimum;
  if (s == "saddle") return Classification::Saddle;
  if (s == "degenerate-needs-higher-order") return Classification::DegenerateNeedsHigherOrder;
  throw DomainError("unknown classification '" + s + "'");
}

template <typename Scalar>
struct SpectrumReport {
  VectorX<Scalar> eigenvalues;   // ascending
  MatrixX<Scalar> eigenvectors;  // orthonormal columns
  int zeroModes = 0;             // |lambda| < zeroTol * max|lambda|
  Classification classification = Classification::DegenerateNeedsHigherOrder;
  Scalar reconstructionResidual{};  // max |H - Q diag(lambda) Q^T|
};

inline constexpr double kDefaultZeroTol = 1e-8;
inline constexpr double kGaugeAngleTol = 1e-6;

/// Decomposition and zero-mode count only. Without gauge directions any zero
/// mode is unexplained, so the classification is local-minimum only when
/// there are no zero modes and no negative eigenvalues.
template <typename Scalar>
SpectrumReport<Scalar> eig_symmetric(const MatrixX<Scalar>& h, Scalar zeroTol = Scalar(kDefaultZeroTol),
                                     const MatrixX<Scalar>* gaugeBasis = nullptr) {
  if (h.rows() != h.cols()) throw DomainError("eig_symmetric needs a square matrix");
  const Scalar hmax = h.cwiseAbs().maxCoeff();
  if (((h - h.transpose()).cwiseAbs().array() > Scalar(1e-12) * std::max(hmax, Scalar(1))).any())
    throw DomainError("eig_symmetric needs a symmetric matrix");

  const EigenDecomposition<Scalar> eig = jacobi_eigen(h);
  SpectrumReport<Scalar> r;
  r.eigenvalues = eig.values;
  r.eigenvectors = eig.vectors;
  r.reconstructionResidual =
      (h - eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose()).cwiseAbs().maxCoeff();

  const Scalar band = zeroTol * eig.values.cwiseAbs().maxCoeff();
  bool negative = false;
  std::vector<Eigen::Index> zeroBand;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (std::abs(eig.values(k)) < band)
      zeroBand.push_back(k);
    else if (eig.values(k) < 0)
      negative = true;
  }
  r.zeroModes = static_cast<int>(zeroBand.size());

  if (negative) {
    r.classification = Classification::Saddle;
    return r;
  }
  if (zeroBand.empty()) {
    r.classification = Classification::LocalMinimum;
    return r;
  }
  if (gaugeBasis == nullptr || gaugeBasis->cols() == 0) {
    r.classification = Classification::DegenerateNeedsHigherOrder;
    return r;
  }
  const Eigen::HouseholderQR<MatrixX<Scalar>> qr(*gaugeBasis);
  const MatrixX<Scalar> q =
      qr.householderQ() * MatrixX<Scalar>::Identity(gaugeBasis->rows(), gaugeBasis->cols());
  bool allGauge = true;
  for (Eigen::Index k : zeroBand) {
    const VectorX<Scalar> v = eig.vectors.col(k);
    const Scalar off = (v - q * (q.transpose() * v)).norm();
    if (off > Scalar(kGaugeAngleTol)) allGauge = false;
  }
  r.classification = allGauge ? Classification::LocalMinimum : Classification::DegenerateNeedsHigherOrder;
  return r;
}

/// Spectrum with the gauge directions of `params` used to vet the zero band.
template <typename Scalar>
SpectrumReport<Scalar> eig_symmetric(const MatrixX<Scalar>& h, const BasicProductParams<Scalar>& params,
                                     Scalar zeroTol = Scalar(kDefaultZeroTol)) {
  if (h.rows() != 2 * params.qubits()) throw DomainError("Hessian size does not match parameters");
  params.require_nondegenerate();
  const MatrixX<Scalar> g = gauge_directions(params);
  return eig_symmetric(h, zeroTol, &g);
}

}  // namespace geoent
