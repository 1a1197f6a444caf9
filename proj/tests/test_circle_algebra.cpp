// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "rfil/sewing.hpp"

using namespace rfil;

TEST_CASE("circle distance") {
    CHECK(circle_distance(0.0, 0.0) == 0.0);
    CHECK(circle_distance(0.0, 0.5) == 0.5);
    CHECK(circle_distance(0.1, 0.9) == Catch::Approx(0.2));
    CHECK(circle_distance(0.9, 0.1) == Catch::Approx(0.2));
}

TEST_CASE("grid basics") {
    CHECK_THROWS_AS(CircleGrid(6), Error);    // not a power of two
    CHECK_THROWS_AS(CircleGrid(4), Error);    // too small
    CircleGrid g(16);
    CHECK(g.node(3) == Catch::Approx(3.0 / 16));
    CHECK(g.forward_span(1, 15) == 2);
    CHECK(g.node_distance(15, 1) == Catch::Approx(2.0 / 16));
}

TEST_CASE("delta1 of a constant vanishes") {
    GridFn<Vec3> g(16, Vec3(1.0, -2.0, 0.5));
    auto d = delta1(g);
    CHECK(d.max_abs_entry() == 0.0);
}

TEST_CASE("delta1 of the chart coordinate") {
    const int n = 8;
    GridFn<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = static_cast<double>(i) / n;
    auto d = delta1(g);
    CHECK(d(4, 2) == Catch::Approx(0.25));  // g(0.5) - g(0.25)
}

TEST_CASE("delta2 after delta1 vanishes identically") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    const int n = 16;
    GridFn<Vec3> g(n);
    for (auto& v : g) v = Vec3(gauss(rng), gauss(rng), gauss(rng));
    CHECK(max_abs_delta2(delta2(delta1(g))) <= 1e-14 * sup_norm(g));
}

TEST_CASE("delta2 matches the three-term formula") {
    const int n = 8;
    TwoParamGrid<double> h(n, 0.0);
    auto xi = [n](int i) { return static_cast<double>(i) / n; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) h(i, j) = xi(i) * xi(j);
    auto d2 = delta2(h);
    for (int t : {7, 5}) {
        for (int u : {3, 1}) {
            for (int s : {0, 2}) {
                const double expect = xi(t) * xi(s) - xi(t) * xi(u) - xi(u) * xi(s);
                CHECK(d2(t, u, s) == Catch::Approx(expect).margin(1e-15));
            }
        }
    }
    TwoParamGrid<double> zero(n, 0.0);
    CHECK(max_abs_delta2(delta2(zero)) == 0.0);
}

TEST_CASE("two-parameter Holder norm") {
    const int n = 8;
    TwoParamGrid<double> zero(n, 0.0);
    CHECK(holder_norm_2(zero, 1.0).value == 0.0);

    // sawtooth increments of the chart coordinate, exact sup by enumeration:
    // pair (7,0) gives |0.875| over circle distance 0.125.
    GridFn<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = static_cast<double>(i) / n;
    auto f = delta1(g);
    CHECK(holder_norm_2(f, 1.0, PairRange::half).value == Catch::Approx(7.0));

    // homogeneity
    TwoParamGrid<double> f3(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) f3(i, j) = -2.5 * f(i, j);
    CHECK(holder_norm_2(f3, 1.0, PairRange::half).value ==
          Catch::Approx(2.5 * holder_norm_2(f, 1.0, PairRange::half).value));

    CHECK_THROWS_AS(holder_norm_2(f, -1.0), ExponentOutOfRange);
}

TEST_CASE("Holder norm is monotone under grid coarsening") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    const int n = 32;
    GridFn<double> g(n);
    for (auto& v : g) v = gauss(rng);
    GridFn<double> coarse(n / 2);
    for (int i = 0; i < n / 2; ++i) coarse[i] = g[2 * i];
    for (double mu : {0.5, 1.0}) {
        const double full = holder_norm_2(delta1(g), mu, PairRange::half).value;
        const double sub = holder_norm_2(delta1(coarse), mu, PairRange::half).value;
        CHECK(sub <= full * (1.0 + 1e-12));
    }
}

TEST_CASE("sewing recovers a quadratic potential") {
    const int n = 32;
    auto xi = [n](int i) { return static_cast<double>(i) / n; };
    TwoParamGrid<double> b(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) b(i, j) = (xi(i) - xi(j)) * (xi(i) - xi(j));
    auto h = [&](int t, int u, int s) { return b(t, s) - b(t, u) - b(u, s); };
    auto f = sewing<double>(n, h, 1.5);
    // delta_2 F = h on every triple
    double worst = 0;
    for (int t = 0; t < n; ++t)
        for (int u = 0; u < n; ++u)
            for (int s = 0; s < n; ++s)
                worst = std::max(worst,
                                 std::abs(f(t, s) - f(t, u) - f(u, s) - h(t, u, s)));
    CHECK(worst <= 1e-12 * std::max(1.0, b.max_abs_entry()));
    // F differs from B by a delta_1-exact correction (delta_2(F - B) = 0).
    // Cells carry the uniform share of the loop obstruction of h: for this B
    // the cell loop sum is (n-1)/n, so each cell holds (n-1)/n^2.
    const double share = (n - 1.0) / (n * static_cast<double>(n));
    for (int i = 0; i < n; ++i)
        CHECK(f((i + 1) % n, i) == Catch::Approx(share).margin(1e-12));
}

TEST_CASE("sewing of zero and error paths") {
    const int n = 16;
    auto zero = [](int, int, int) { return 0.0; };
    auto f = sewing<double>(n, zero, 1.2);
    CHECK(f.max_abs_entry() == 0.0);
    CHECK_THROWS_AS(sewing<double>(n, zero, 1.0), ExponentOutOfRange);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss;
    auto not_exact = [&rng, &gauss](int t, int u, int s) {
        return std::sin(7.0 * t + 3.0 * u + s) + ((t + 2 * u + 3 * s) % 5) * 0.1;
    };
    CHECK_THROWS_AS(sewing<double>(n, not_exact, 1.2), NotExact);
}

TEST_CASE("sewing bound (Proposition constant) on random exact inputs") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> gauss;
    const int n = 32;
    for (double mu : {1.1, 1.2, 1.5}) {
        for (int rep = 0; rep < 5; ++rep) {
            TwoParamGrid<double> b(n, 0.0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j) b(i, j) = gauss(rng);
            auto h = [&](int t, int u, int s) { return b(t, s) - b(t, u) - b(u, s); };
            auto lam = sewing<double>(n, h, mu);
            const double lhs = holder_norm_2(lam, mu, PairRange::forward_near).value;
            const double hnorm = c3_holder_norm(n, h, mu, mu / 2);
            CHECK(lhs <= hnorm / (std::pow(2.0, mu) - 2.0) * (1.0 + 1e-12));
        }
    }
}
