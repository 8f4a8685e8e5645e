#pragma once

#include <Eigen/Dense>

namespace nctf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Added to every denominator of the multiplicative updates.
inline constexpr double kDefaultEps = 1e-12;

}  // namespace nctf
