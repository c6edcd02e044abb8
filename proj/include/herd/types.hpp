#pragma once

#include <Eigen/Core>

namespace herd {

using Index = Eigen::Index;

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VecX<double>;
using Matrix = MatX<double>;

}  // namespace herd
