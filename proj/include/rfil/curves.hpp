// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rfil/cochain.hpp"

namespace rfil {

inline GridFn<Vec3> circle_curve(int n, double radius = 1.0) {
    GridFn<Vec3> g(n);
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * M_PI * i / n;
        g[i] = Vec3(radius * std::cos(th), radius * std::sin(th), 0.0);
    }
    return g;
}

/// Knotted smooth test geometry:
/// (a (2+cos 4 pi xi) cos 2 pi xi, a (2+cos 4 pi xi) sin 2 pi xi, a sin 4 pi xi).
inline GridFn<Vec3> trefoil_curve(int n, double a = 0.5) {
    GridFn<Vec3> g(n);
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * M_PI * i / n;
        const double r = 2.0 + std::cos(2.0 * t);
        g[i] = a * Vec3(r * std::cos(t), r * std::sin(t), std::sin(2.0 * t));
    }
    return g;
}

}  // namespace rfil
