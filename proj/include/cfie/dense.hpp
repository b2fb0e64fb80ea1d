#pragma once

#include <limits>

#include <Eigen/Core>

namespace cfie {

constexpr int kDenseCap = 4096;

// Singular values in descending order (LAPACK zgesvd, no vectors).
// Throws CapacityError above `cap`.
Eigen::VectorXd singular_values(const Eigen::MatrixXcd& a, int cap = kDenseCap);

// sigma_max / sigma_min, or +infinity when sigma_min is zero to machine
// precision (sigma_min <= n eps sigma_max).
double condition_number(const Eigen::MatrixXcd& a, int cap = kDenseCap);
double condition_from(const Eigen::VectorXd& sv, int n);

}  // namespace cfie
