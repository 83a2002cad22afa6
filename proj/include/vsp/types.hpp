#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace vsp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

}  // namespace vsp
