// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace bspd {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Zero-based index into the angle grid / antenna rows.
using GridIndex = std::size_t;
using IndexSet = std::vector<GridIndex>;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace bspd
