#pragma once

#include <Eigen/Core>

namespace hmnc {

inline constexpr int kMaxDim = 3;

/// Cartesian point or vector in R^n, n <= 3. Fixed capacity, no heap storage.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

/// Barycentric coordinates (lambda_0, ..., lambda_n) of a point in an n-simplex.
using BaryPoint = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim + 1, 1>;

/// Row i holds grad(lambda_i) of an affine simplex.
using BaryGradients =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor, kMaxDim + 1, kMaxDim>;

}  // namespace hmnc
