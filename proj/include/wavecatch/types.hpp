#pragma once

#include <Eigen/Dense>

namespace wavecatch {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Vector7d = Eigen::Matrix<double, 7, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix7d = Eigen::Matrix<double, 7, 7>;

inline constexpr int kArmDof = 7;

}  // namespace wavecatch
