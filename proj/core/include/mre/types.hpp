#pragma once

#include <Eigen/Dense>

namespace mre {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

}  // namespace mre
