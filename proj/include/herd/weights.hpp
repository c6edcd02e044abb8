#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "herd/error.hpp"
#include "herd/types.hpp"

namespace herd {

/// Nonnegative per-asset weights w. At least two entries must be strictly
/// positive, otherwise every herd index is degenerate.
template <typename Scalar>
class WeightVector {
 public:
  using Vector = VecX<Scalar>;

  explicit WeightVector(Vector weights) : weights_(std::move(weights)) {
    Index positive = 0;
    for (Index i = 0; i < weights_.size(); ++i) {
      const Scalar wi = weights_(i);
      if (!(wi >= Scalar(0)) || !std::isfinite(static_cast<double>(wi))) {
        throw Error(ErrorCode::InvalidWeights,
                    "weight " + std::to_string(i) + " is negative or not finite");
      }
      if (wi > Scalar(0)) ++positive;
    }
    if (positive < 2) {
      throw Error(ErrorCode::InvalidWeights, "at least two weights must be strictly positive");
    }
  }

  static WeightVector equal(Index d) { return WeightVector(Vector::Ones(d)); }

  const Vector& values() const noexcept { return weights_; }
  Index size() const noexcept { return weights_.size(); }
  Scalar operator()(Index i) const { return weights_(i); }

 private:
  Vector weights_;
};

using Weights = WeightVector<double>;

}  // namespace herd
