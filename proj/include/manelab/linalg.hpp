#pragma once

#include <Eigen/Dense>

namespace manelab {

// Dimensions here never exceed 6; fixed max size keeps Eigen allocations on
// the stack and the hot loops allocation-free.
using VecD = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 8, 1>;
using MatD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 8, 8>;

} // namespace manelab
