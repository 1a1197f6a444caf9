// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <memory>

#include "rfil/controlled.hpp"

namespace rfil {

/// 8-point Gauss-Legendre rule on [0,1] (exact through degree 15), used for
/// the chord integral in the remainder representation of a composition.
inline const std::array<std::pair<double, double>, 8>& gauss8_01() {
    static const std::array<std::pair<double, double>, 8> rule = {{
        {0.01985507175123188, 0.05061426814518813},
        {0.10166676129318664, 0.11119051722668724},
        {0.2372337950418355, 0.15685332293894364},
        {0.40828267875217505, 0.18134189168918099},
        {0.5917173212478249, 0.18134189168918099},
        {0.7627662049581645, 0.15685332293894364},
        {0.8983332387068134, 0.11119051722668724},
        {0.9801449282487681, 0.05061426814518813},
    }};
    return rule;
}

/// A map R^3 -> R^D that is at least C^2, exposing value and Jacobian.
/// smoothness_order() reports how many derivatives are trustworthy.
template <int D>
struct SmoothMap {
    using OutVec = Eigen::Matrix<double, D, 1>;
    using OutJac = Eigen::Matrix<double, D, 3>;
    virtual ~SmoothMap() = default;
    virtual OutVec value(const Vec3& x) const = 0;
    virtual OutJac jacobian(const Vec3& x) const = 0;
    virtual int smoothness_order() const { return 3; }
};

struct IdentityMap final : SmoothMap<3> {
    Vec3 value(const Vec3& x) const override { return x; }
    Mat3 jacobian(const Vec3&) const override { return Mat3::Identity(); }
    int smoothness_order() const override { return 100; }
};

struct AffineMap final : SmoothMap<3> {
    Mat3 a;
    Vec3 b;
    AffineMap(const Mat3& a_, const Vec3& b_) : a(a_), b(b_) {}
    Vec3 value(const Vec3& x) const override { return a * x + b; }
    Mat3 jacobian(const Vec3&) const override { return a; }
    int smoothness_order() const override { return 100; }
};

/// m(x) = |x|^2 (scalar quadratic test map).
struct SquaredNormMap final : SmoothMap<1> {
    Eigen::Matrix<double, 1, 1> value(const Vec3& x) const override {
        Eigen::Matrix<double, 1, 1> v;
        v(0) = x.squaredNorm();
        return v;
    }
    Eigen::Matrix<double, 1, 3> jacobian(const Vec3& x) const override {
        return 2.0 * x.transpose();
    }
    int smoothness_order() const override { return 100; }
};

/// (phi(Y), phi'(Y) Y') of a controlled path: the composed path is again
/// weakly controlled by the same base.
template <int D>
Controlled<D> compose_smooth(const SmoothMap<D>& map, const ControlledVec& c) {
    if (map.smoothness_order() < 2)
        throw InsufficientSmoothness("compose_smooth: need a C^2 map");
    const int n = c.size();
    Controlled<D> out;
    out.base = c.base;
    out.y.resize(n);
    out.y_prime.resize(n);
    for (int i = 0; i < n; ++i) {
        out.y[i] = map.value(c.y[i]);
        out.y_prime[i] = map.jacobian(c.y[i]) * c.y_prime[i];
    }
    return out;
}

/// Remainder of the composition from its integral representation,
///
///   R^W(xi,eta) = phi'(Y(eta)) R^Y(xi,eta)
///              + sum_k (Y_k(xi)-Y_k(eta)) int_0^1 [d_k phi(y(r)) - d_k phi(Y(eta))] dr,
///
/// with y(r) the chord from Y(eta) to Y(xi) and the r-integral by composite
/// 8-point Gauss-Legendre (exact for quadratic maps with a single panel; the
/// panel count follows the chord length in units of length_scale so that
/// kernel-sized features stay resolved).  Agrees with the definitional
/// remainder up to quadrature error only; that agreement is the dual-route
/// check on compositions.
template <int D>
typename Controlled<D>::Val compose_remainder_formula(const SmoothMap<D>& map,
                                                      const ControlledVec& c, int i, int j,
                                                      double length_scale = 0.0) {
    using Val = typename Controlled<D>::Val;
    const Vec3 yi = c.y[i], yj = c.y[j];
    const Vec3 dy = yi - yj;
    const auto jac0 = map.jacobian(yj);
    Val out = jac0 * c.remainder(i, j);
    int panels = 1;
    if (length_scale > 0)
        panels = std::min(8, std::max(1, static_cast<int>(std::ceil(dy.norm() / length_scale))));
    typename SmoothMap<D>::OutJac avg = SmoothMap<D>::OutJac::Zero();
    for (int p = 0; p < panels; ++p)
        for (const auto& [node, weight] : gauss8_01()) {
            const double r = (p + node) / panels;
            avg += weight / panels * (map.jacobian(yj + r * dy) - jac0);
        }
    out += avg * dy;
    return out;
}

struct ComposeRemainderCheck {
    double max_abs_deviation = 0;
    double scale = 0;  // max |R| over compared pairs
    double rel() const { return scale > 0 ? max_abs_deviation / scale : 0.0; }
};

/// Compare the definitional remainder of compose_smooth(map, c) against the
/// formula remainder at every pair.
template <int D>
ComposeRemainderCheck compose_remainder_check(const SmoothMap<D>& map, const ControlledVec& c,
                                              double length_scale = 0.0) {
    const auto w = compose_smooth(map, c);
    const int n = c.size();
    ComposeRemainderCheck res;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto def = w.remainder(i, j);
            const auto form = compose_remainder_formula(map, c, i, j, length_scale);
            res.max_abs_deviation = std::max(res.max_abs_deviation, max_abs(def - form));
            res.scale = std::max(res.scale, max_abs(def));
        }
    return res;
}

struct ComposeNormBound {
    double lhs = 0;           // ||phi(Y)||_{D_X}
    double rhs_without_k = 0; // ||grad phi||_{C^1} ||Y|| (1+||Y||) (1+|X|)^2
    double fitted_k = 0;
};

/// Check of the composition norm bound with a fitted constant K.
/// grad_c1 is the caller's bound for ||grad phi||_{C^1} on the relevant region.
template <int D>
ComposeNormBound compose_norm_bound(const SmoothMap<D>& map, const ControlledVec& c,
                                    double grad_c1) {
    ComposeNormBound out;
    out.lhs = controlled_norm(compose_smooth(map, c)).full_norm;
    const double ny = controlled_norm(c).full_norm;
    const double hx = c.base->holder_x();
    out.rhs_without_k = grad_c1 * ny * (1.0 + ny) * (1.0 + hx) * (1.0 + hx);
    out.fitted_k = out.rhs_without_k > 0 ? out.lhs / out.rhs_without_k : 0.0;
    return out;
}

}  // namespace rfil
