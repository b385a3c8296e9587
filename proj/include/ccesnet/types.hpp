#pragma once

#include <Eigen/Dense>

namespace ccesnet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Kernels that have an OpenMP path keep the plain loop as the reference.
enum class Exec { serial, parallel };

}  // namespace ccesnet
