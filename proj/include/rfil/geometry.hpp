// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>

namespace rfil {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using RowVec3 = Eigen::RowVector3d;

// Symmetric third/fourth derivative tensors of a scalar field.
// Ten3: t[c](a,b) = d_a d_b d_c f.  Ten4: t[c][d](a,b) = d_a d_b d_c d_d f.
using Ten3 = std::array<Mat3, 3>;
using Ten4 = std::array<std::array<Mat3, 3>, 3>;

inline double levi_civita(int i, int j, int k) {
    if (i == j || j == k || i == k) return 0.0;
    return ((j - i + 3) % 3 == 1) ? 1.0 : -1.0;
}

inline double max_abs(double v) { return std::abs(v); }
template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.cwiseAbs().maxCoeff();
}

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace rfil
