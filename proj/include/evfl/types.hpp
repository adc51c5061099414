#pragma once

#include <Eigen/Core>

namespace evfl {

// 64-bit floats throughout; gradient checks and cross-run comparisons rely on it.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace evfl
