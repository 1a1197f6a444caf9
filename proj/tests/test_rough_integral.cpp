// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "rfil/brownian.hpp"
#include "rfil/compose.hpp"
#include "rfil/curves.hpp"
#include "rfil/kernel.hpp"
#include "rfil/rough_integral.hpp"

using namespace rfil;

namespace {

struct KernelScalarMap final : SmoothMap<1> {
    KernelSpec kernel;
    Vec3 x0;
    KernelScalarMap(const KernelSpec& k, const Vec3& x) : kernel(k), x0(x) {}
    Eigen::Matrix<double, 1, 1> value(const Vec3& y) const override {
        Eigen::Matrix<double, 1, 1> v;
        v(0) = kernel.eval(y - x0, 0).phi;
        return v;
    }
    Eigen::Matrix<double, 1, 3> jacobian(const Vec3& y) const override {
        return kernel.eval(y - x0, 1).grad.transpose();
    }
};

}  // namespace

TEST_CASE("integral against a constant path vanishes") {
    auto base = lift_piecewise_linear(circle_curve(64), 0.9);
    auto w = self_controlled(base);
    auto z = make_controlled(GridFn<Vec3>(64, Vec3(1, 2, 3)),
                             std::vector<Mat3>(64, Mat3::Zero()), base);
    CHECK(rough_integral(w, z).total == 0.0);
}

TEST_CASE("closed-curve exactness of the circle pairing") {
    auto base = lift_piecewise_linear(circle_curve(256), 0.9);
    auto c = self_controlled(base);
    // oint <gamma, d gamma> = (1/2) oint d|gamma|^2 = 0 on a closed curve
    CHECK(std::abs(rough_integral(c, c).total) <= 1e-10);
}

TEST_CASE("base mismatch and low exponent are rejected") {
    auto b1 = lift_piecewise_linear(circle_curve(64), 0.9);
    auto b2 = lift_piecewise_linear(circle_curve(64), 0.9);
    CHECK_THROWS_AS(rough_integral(self_controlled(b1), self_controlled(b2)), BaseMismatch);
    auto low = lift_piecewise_linear(sample_brownian_bridge(64, 1), 1.0 / 3.0);
    CHECK_THROWS_AS(rough_integral(self_controlled(low), self_controlled(low)),
                    ExponentTooLow);
    CHECK_THROWS_AS(young_integral(GridFn<Vec3>(8, Vec3::Zero()),
                                   GridFn<Vec3>(8, Vec3::Zero()), 0.5),
                    ExponentTooLow);
}

TEST_CASE("tensor integral of a bridge reproduces the lift's Levy area") {
    auto base = lift_piecewise_linear(sample_brownian_bridge(128, 3), 0.4);
    auto z = self_controlled(base);
    Mat3 total;
    for (int a = 0; a < 3; ++a) {
        GridFn<double> w(128);
        std::vector<RowVec3> wp(128);
        for (int i = 0; i < 128; ++i) {
            w[i] = base->x(i)[a];
            wp[i] = RowVec3::Unit(a);
        }
        total.row(a) = rough_integral(make_scalar_controlled(w, wp, base), z).total.transpose();
    }
    // oint X (x) dX assembled per component vs the full-loop second level
    // (they are built from the same segment areas, so agreement is exact)
    const Mat3 loop = base->full_loop_area();
    const Mat3 anti_total = 0.5 * (total - total.transpose());
    const Mat3 anti_loop = 0.5 * (loop - loop.transpose());
    CHECK(max_abs(anti_total - anti_loop) <= 1e-10 * std::max(1.0, max_abs(anti_loop)));
}

TEST_CASE("Young oracle on trigonometric pair") {
    const int n = 512;
    GridFn<double> w(n);
    GridFn<Vec3> z(n);
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * M_PI * i / n;
        w[i] = std::cos(th);
        z[i] = Vec3(0.0, std::sin(th), 0.0);
    }
    const Vec3 total = young_integral(w, z, 0.9);
    CHECK(std::abs(total[1] - M_PI) < 1e-4);
    // telescoping: oint 1 dz = 0
    const Vec3 ones = young_integral(GridFn<double>(n, 1.0), z, 0.9);
    CHECK(ones.norm() <= 1e-14);
}

TEST_CASE("partials are additive and Q captures the local error") {
    auto base = lift_piecewise_linear(circle_curve(64), 0.9);
    auto c = self_controlled(base);
    auto res = rough_integral(c, c);
    // chart-signed partials telescope exactly
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> pick(0, 63);
    for (int it = 0; it < 200; ++it) {
        const int t = pick(rng), u = pick(rng), s = pick(rng);
        const double defect = res.partial(t, s) - res.partial(t, u) - res.partial(u, s);
        CHECK(std::abs(defect) <= 1e-13);
    }
    auto q = q_grid(res, c, c);
    for (int i = 0; i < 64; ++i) CHECK(q(i, i) == 0.0);
}

TEST_CASE("Q vanishes for constant integrands") {
    auto base = lift_piecewise_linear(circle_curve(64), 0.9);
    auto c = self_controlled(base);
    auto w = make_controlled(GridFn<Vec3>(64, Vec3(1, 1, 1)),
                             std::vector<Mat3>(64, Mat3::Zero()), base);
    auto res = rough_integral(w, c);
    // W constant: int W dZ telescopes, expansion is exact, Q = 0
    CHECK(q_grid(res, w, c).max_abs_entry() <= 1e-14);
}

TEST_CASE("Q-remainder constant is stable under refinement") {
    std::vector<double> cs;
    for (int n : {64, 128, 256}) {
        auto base = lift_piecewise_linear(circle_curve(n), 0.9);
        auto c = self_controlled(base);
        auto rep = q_remainder(rough_integral(c, c), c, c);
        CHECK(std::isfinite(rep.q_norm));
        cs.push_back(rep.fitted_c);
    }
    for (double v : cs) {
        CHECK(v <= cs[0] * 1.5 + 1e-12);
        CHECK(v >= cs[0] * 0.5 - 1e-12);
    }
}

TEST_CASE("local expansion error shrinks under refinement") {
    // delta_2 Q at adjacent triples ~ d^{3 nu}; halving the spacing must
    // shrink it by at least 2^{3 nu - 1}
    double prev = -1;
    for (int n : {64, 128, 256}) {
        auto base = lift_piecewise_linear(circle_curve(n), 0.9);
        auto c = self_controlled(base);
        auto q = q_grid(rough_integral(c, c), c, c);
        double worst = 0;
        for (int i = 0; i < n; ++i) {
            const int t = (i + 2) % n, u = (i + 1) % n;
            worst = std::max(worst, std::abs(q(t, i) - q(t, u) - q(u, i)));
        }
        if (prev > 0) CHECK(worst <= prev / 2.0);
        prev = worst;
    }
}

TEST_CASE("composition with the identity and affine maps") {
    auto base = lift_piecewise_linear(sample_brownian_bridge(64, 17, Vec3::Zero(), 0.5), 0.4);
    auto c = self_controlled(base);
    SECTION("identity returns the input") {
        auto w = compose_smooth(IdentityMap{}, c);
        for (int i = 0; i < 64; ++i) {
            CHECK((w.y[i] - c.y[i]).norm() == 0.0);
            CHECK(max_abs(Mat3(w.y_prime[i] - c.y_prime[i])) == 0.0);
        }
    }
    SECTION("affine map: output remainder is A times input remainder") {
        Mat3 a;
        a << 1, 2, 0, -1, 0.5, 3, 0, 0, 2;
        AffineMap map(a, Vec3(1, -1, 0));
        auto w = compose_smooth(map, c);
        for (int i : {3, 17, 40}) {
            for (int j : {5, 25}) {
                const Vec3 expect = a * c.remainder(i, j);
                CHECK((w.remainder(i, j) - expect).norm() <= 1e-13);
            }
        }
        const auto chk = compose_remainder_check(map, c);
        CHECK(chk.max_abs_deviation <= 1e-13 * std::max(1.0, chk.scale));
    }
}

TEST_CASE("dual remainder computation on quadratic and kernel maps") {
    auto circle = self_controlled(lift_piecewise_linear(circle_curve(128), 0.9));
    auto bridge = self_controlled(
        lift_piecewise_linear(sample_brownian_bridge(128, 7, Vec3::Zero(), 0.5), 0.4));
    SECTION("quadratic map is exact under the 8-point rule") {
        SquaredNormMap map;
        for (const auto& c : {circle, bridge}) {
            const auto chk = compose_remainder_check(map, c);
            CHECK(chk.rel() <= 1e-9);
        }
    }
    SECTION("Rosenhead kernel map") {
        KernelScalarMap map(KernelSpec(1.0, 0.5), Vec3(0.1, -0.2, 0.3));
        for (const auto& c : {circle, bridge}) {
            const auto chk = compose_remainder_check(map, c, 0.5);
            CHECK(chk.rel() <= 1e-6);
        }
    }
    SECTION("norm bound with fitted K") {
        SquaredNormMap map;
        // |grad m|_{C^1} on the relevant ball: |2x| <= 2 sup|Y|, |2 I| = 2
        const double grad_c1 = 2.0 * sup_norm(circle.y) + 2.0;
        const auto bound = compose_norm_bound(map, circle, grad_c1);
        CHECK(bound.fitted_k <= 1.0);  // K >= 1 makes the bound hold
        CHECK(bound.lhs <= grad_c1 * 1.0 * (1.0 + controlled_norm(circle).full_norm) *
                               std::pow(1.0 + circle.base->holder_x(), 2) *
                               (1.0 + controlled_norm(circle).full_norm));
    }
}

TEST_CASE("insufficient smoothness is rejected") {
    struct RoughMap final : SmoothMap<1> {
        Eigen::Matrix<double, 1, 1> value(const Vec3&) const override { return {}; }
        Eigen::Matrix<double, 1, 3> jacobian(const Vec3&) const override { return {}; }
        int smoothness_order() const override { return 1; }
    };
    auto c = self_controlled(lift_piecewise_linear(circle_curve(64), 0.9));
    CHECK_THROWS_AS(compose_smooth(RoughMap{}, c), InsufficientSmoothness);
}
