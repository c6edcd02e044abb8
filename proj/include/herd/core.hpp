#pragma once

// Herd-behaviour indices on the first two moments of a weighted asset vector
// X(t) and its comonotonic counterpart X^c(t).
//
//   CIX  = sum_{i!=j} w_i w_j cov(X_i, X_j) / sum_{i!=j} w_i w_j sd_i sd_j
//   HIX  = Var[S] / Var[S^c]
//   RHIX = sum_{i!=j} w_i w_j cov(X_i, X_j) / sum_{i!=j} w_i w_j cov(X^c_i, X^c_j)
//
// Everything here is header-only and templated on the scalar type.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "herd/error.hpp"
#include "herd/types.hpp"
#include "herd/weights.hpp"

namespace herd {

enum class IndexKind { Cix, Hix, Rhix };

inline std::string_view to_string(IndexKind kind);
inline IndexKind parse_index_kind(std::string_view text);

/// Absolute tolerance on eigenvalues and on the elementwise Frechet bound,
/// scaled by max(1, largest variance) so that it is unit-free.
inline constexpr double kMomentTolerance = 1e-10;

template <typename Scalar>
struct IndexValue {
  IndexKind kind;
  Scalar value;
  Scalar lower_bound;
  Scalar upper_bound;
};

namespace detail {

template <typename Derived>
typename Derived::Scalar moment_scale(const Eigen::MatrixBase<Derived>& cov) {
  using Scalar = typename Derived::Scalar;
  Scalar scale(1);
  for (Index i = 0; i < cov.rows(); ++i) scale = std::max(scale, Scalar(std::abs(cov(i, i))));
  return scale;
}

template <typename Scalar>
void require_square(const MatX<Scalar>& m, Index d, std::string_view what) {
  if (m.rows() != d || m.cols() != d) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " must be " + std::to_string(d) + "x" + std::to_string(d));
  }
}

}  // namespace detail

/// Means, covariance matrix of X(t) and covariance matrix of the comonotonic
/// coupling X^c(t) = (F_1^{-1}(U), ..., F_d^{-1}(U)).
template <typename Scalar>
class MomentSummary {
 public:
  using Vector = VecX<Scalar>;
  using Matrix = MatX<Scalar>;

  MomentSummary(Vector means, Matrix cov, Matrix comono_cov)
      : means_(std::move(means)), cov_(std::move(cov)), comono_cov_(std::move(comono_cov)) {
    validate();
  }

  const Vector& means() const noexcept { return means_; }
  const Matrix& cov() const noexcept { return cov_; }
  const Matrix& comono_cov() const noexcept { return comono_cov_; }
  Index dim() const noexcept { return means_.size(); }

  Vector variances() const { return cov_.diagonal(); }
  Vector sds() const { return cov_.diagonal().cwiseMax(Scalar(0)).cwiseSqrt(); }

 private:
  void validate() const {
    const Index d = means_.size();
    if (d < 2) throw Error(ErrorCode::DimensionMismatch, "moment summary needs d >= 2");
    detail::require_square(cov_, d, "cov");
    detail::require_square(comono_cov_, d, "comono_cov");
    if (!cov_.allFinite() || !comono_cov_.allFinite() || !means_.allFinite()) {
      throw Error(ErrorCode::InvalidParameter, "moment summary contains non-finite entries");
    }

    const Scalar tol = Scalar(kMomentTolerance) * detail::moment_scale(cov_);
    for (Index i = 0; i < d; ++i) {
      if (std::abs(cov_(i, i) - comono_cov_(i, i)) > tol) {
        throw Error(ErrorCode::InvalidParameter,
                    "comonotonic coupling must preserve the variance of asset " + std::to_string(i));
      }
      for (Index j = 0; j < i; ++j) {
        if (std::abs(cov_(i, j) - cov_(j, i)) > tol ||
            std::abs(comono_cov_(i, j) - comono_cov_(j, i)) > tol) {
          throw Error(ErrorCode::InvalidParameter, "covariance matrices must be symmetric");
        }
        if (comono_cov_(i, j) < cov_(i, j) - tol) {
          throw Error(ErrorCode::InvalidParameter,
                      "comonotonic covariance below the ordinary covariance for pair (" +
                          std::to_string(i) + "," + std::to_string(j) + ")");
        }
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov_, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < -tol) {
      throw Error(ErrorCode::NotPositiveSemidefinite, "covariance matrix is not positive semidefinite");
    }
  }

  Vector means_;
  Matrix cov_;
  Matrix comono_cov_;
};

/// sum_{i != j} w_i w_j cov(i, j).
template <typename Scalar, typename Derived>
Scalar weighted_cov(const WeightVector<Scalar>& w, const Eigen::MatrixBase<Derived>& cov) {
  const Index d = w.size();
  if (cov.rows() != d || cov.cols() != d) {
    throw Error(ErrorCode::DimensionMismatch, "weights and covariance dimensions differ");
  }
  Scalar sum(0);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      if (i != j) sum += w(i) * w(j) * Scalar(cov(i, j));
    }
  }
  return sum;
}

/// w' cov w, the variance of S = sum_i w_i X_i.
template <typename Scalar, typename Derived>
Scalar weighted_var(const WeightVector<Scalar>& w, const Eigen::MatrixBase<Derived>& cov) {
  const Index d = w.size();
  if (cov.rows() != d || cov.cols() != d) {
    throw Error(ErrorCode::DimensionMismatch, "weights and covariance dimensions differ");
  }
  Scalar diag(0);
  for (Index i = 0; i < d; ++i) diag += w(i) * w(i) * Scalar(cov(i, i));
  return diag + weighted_cov(w, cov);
}

namespace detail {

template <typename Scalar>
void require_dim(const WeightVector<Scalar>& w, const MomentSummary<Scalar>& m) {
  if (w.size() != m.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "weights and moment summary dimensions differ");
  }
}

// sum_i w_i^2 Var[X_i]
template <typename Scalar>
Scalar own_variance_mass(const WeightVector<Scalar>& w, const VecX<Scalar>& vars) {
  return (w.values().array().square() * vars.array()).sum();
}

// sum_{i != j} w_i w_j sd_i sd_j
template <typename Scalar>
Scalar sd_product_mass(const WeightVector<Scalar>& w, const VecX<Scalar>& sds) {
  Scalar sum(0);
  for (Index i = 0; i < w.size(); ++i) {
    for (Index j = 0; j < w.size(); ++j) {
      if (i != j) sum += w(i) * w(j) * sds(i) * sds(j);
    }
  }
  return sum;
}

template <typename Scalar>
void require_positive(Scalar denominator, std::string_view what) {
  if (!(denominator > Scalar(0))) {
    throw Error(ErrorCode::DegenerateDenominator, std::string(what) + " denominator is not positive");
  }
}

}  // namespace detail

template <typename Scalar>
IndexValue<Scalar> cix(const WeightVector<Scalar>& w, const MomentSummary<Scalar>& m) {
  detail::require_dim(w, m);
  const Scalar denom = detail::sd_product_mass(w, m.sds());
  detail::require_positive(denom, "CIX");
  const Scalar own = detail::own_variance_mass(w, m.variances());
  return {IndexKind::Cix, weighted_cov(w, m.cov()) / denom, -own / denom,
          weighted_cov(w, m.comono_cov()) / denom};
}

template <typename Scalar>
IndexValue<Scalar> hix(const WeightVector<Scalar>& w, const MomentSummary<Scalar>& m) {
  detail::require_dim(w, m);
  const Scalar denom = weighted_var(w, m.comono_cov());
  detail::require_positive(denom, "HIX");
  return {IndexKind::Hix, weighted_var(w, m.cov()) / denom, Scalar(0), Scalar(1)};
}

template <typename Scalar>
IndexValue<Scalar> rhix(const WeightVector<Scalar>& w, const MomentSummary<Scalar>& m) {
  detail::require_dim(w, m);
  const Scalar denom = weighted_cov(w, m.comono_cov());
  detail::require_positive(denom, "RHIX");
  const Scalar own = detail::own_variance_mass(w, m.variances());
  return {IndexKind::Rhix, weighted_cov(w, m.cov()) / denom, -own / denom, Scalar(1)};
}

template <typename Scalar>
IndexValue<Scalar> evaluate(IndexKind kind, const WeightVector<Scalar>& w, const MomentSummary<Scalar>& m) {
  switch (kind) {
    case IndexKind::Cix: return cix(w, m);
    case IndexKind::Hix: return hix(w, m);
    case IndexKind::Rhix: return rhix(w, m);
  }
  throw Error(ErrorCode::InvalidParameter, "unknown index kind");
}

/// RHIX from portfolio variances only:
/// (Var[S] - sum w_i^2 Var[X_i]) / (Var[S^c] - sum w_i^2 Var[X_i]).
template <typename Scalar, typename Derived>
Scalar rhix_from_variances(Scalar var_s, Scalar var_sc, const WeightVector<Scalar>& w,
                           const Eigen::MatrixBase<Derived>& asset_vars) {
  if (asset_vars.size() != w.size()) {
    throw Error(ErrorCode::DimensionMismatch, "weights and asset variances differ in length");
  }
  const Scalar own = detail::own_variance_mass(w, VecX<Scalar>(asset_vars.template cast<Scalar>()));
  const Scalar denom = var_sc - own;
  detail::require_positive(denom, "implied RHIX");
  return (var_s - own) / denom;
}

/// Sample covariance with divisor n - 1, filled symmetrically.
template <typename Derived>
MatX<typename Derived::Scalar> sample_cov(const Eigen::MatrixBase<Derived>& samples) {
  using Scalar = typename Derived::Scalar;
  const Index n = samples.rows();
  const Index d = samples.cols();
  if (n < 2) throw Error(ErrorCode::InsufficientSamples, "sample covariance needs at least 2 rows");
  const VecX<Scalar> mean = samples.colwise().mean().transpose();
  const MatX<Scalar> centered = samples.rowwise() - mean.transpose();
  MatX<Scalar> cov(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j <= i; ++j) {
      Scalar s(0);
      for (Index k = 0; k < n; ++k) s += centered(k, i) * centered(k, j);
      cov(i, j) = cov(j, i) = s / Scalar(n - 1);
    }
  }
  return cov;
}

/// Sample analogue of the comonotonic coupling. Each column's order statistics
/// are re-paired along the rank order of the first column (stable, so ties keep
/// input order); this is the coupling of fully sorted columns with the row
/// labels of column 0, so an already comonotonic input is returned unchanged.
template <typename Derived>
MatX<typename Derived::Scalar> comonotonic_rearrangement(const Eigen::MatrixBase<Derived>& samples) {
  using Scalar = typename Derived::Scalar;
  const Index n = samples.rows();
  const Index d = samples.cols();
  std::vector<Index> anchor(static_cast<std::size_t>(n));
  std::iota(anchor.begin(), anchor.end(), Index{0});
  std::stable_sort(anchor.begin(), anchor.end(),
                   [&](Index a, Index b) { return samples(a, 0) < samples(b, 0); });

  MatX<Scalar> coupled(n, d);
  std::vector<Scalar> column(static_cast<std::size_t>(n));
  for (Index j = 0; j < d; ++j) {
    for (Index k = 0; k < n; ++k) column[static_cast<std::size_t>(k)] = samples(k, j);
    std::stable_sort(column.begin(), column.end());
    for (Index k = 0; k < n; ++k) coupled(anchor[static_cast<std::size_t>(k)], j) = column[static_cast<std::size_t>(k)];
  }
  return coupled;
}

/// Sample covariance of the comonotonic rearrangement. The diagonal is the
/// sample variance of the raw columns, bit for bit.
template <typename Derived>
MatX<typename Derived::Scalar> empirical_comono_cov(const Eigen::MatrixBase<Derived>& samples) {
  using Scalar = typename Derived::Scalar;
  if (samples.rows() < 2) {
    throw Error(ErrorCode::InsufficientSamples, "comonotonic covariance needs at least 2 rows");
  }
  const MatX<Scalar> raw = sample_cov(samples);
  MatX<Scalar> comono = sample_cov(comonotonic_rearrangement(samples));
  comono.diagonal() = raw.diagonal();
  return comono;
}

/// Model-free moment summary: sample means, sample covariance and the
/// sort-coupled comonotonic covariance of a T x d sample matrix.
template <typename Derived>
MomentSummary<typename Derived::Scalar> empirical_moments(const Eigen::MatrixBase<Derived>& samples) {
  using Scalar = typename Derived::Scalar;
  if (samples.rows() < 2) {
    throw Error(ErrorCode::InsufficientSamples, "empirical moments need at least 2 rows");
  }
  return MomentSummary<Scalar>(samples.colwise().mean().transpose(), sample_cov(samples),
                               empirical_comono_cov(samples));
}

inline std::string_view to_string(IndexKind kind) {
  switch (kind) {
    case IndexKind::Cix: return "cix";
    case IndexKind::Hix: return "hix";
    case IndexKind::Rhix: return "rhix";
  }
  return "unknown";
}

inline IndexKind parse_index_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "cix") return IndexKind::Cix;
  if (lower == "hix") return IndexKind::Hix;
  if (lower == "rhix") return IndexKind::Rhix;
  throw Error(ErrorCode::InvalidConfig, "unknown index kind '" + std::string(text) + "'");
}

}  // namespace herd
