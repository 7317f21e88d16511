#pragma once

#include <Eigen/Dense>

namespace spadmm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
/// Two-row constraint matrix: expected-return row stacked on the budget row.
using ConstraintMat = Eigen::Matrix<double, 2, Eigen::Dynamic>;

}  // namespace spadmm
