#pragma once

#include <Eigen/Dense>

namespace ensembed {

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Real = double;
using Matrix = MatX<Real>;
using Vector = VecX<Real>;
using IntVector = Eigen::VectorXi;

using Index = Eigen::Index;

} // namespace ensembed
