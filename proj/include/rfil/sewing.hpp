// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <random>

#include "rfil/cochain.hpp"

namespace rfil {

/// Two-exponent Holder norm |h|_{rho, mu-rho} of a three-parameter callable,
/// sup over triples (a,b,c) whose forward arcs c->b and b->a are each <= 1/4.
/// The single-term rho = mu/2 instantiation of the C_3^mu norm.
template <class H>
double c3_holder_norm(int n, const H& h, double mu, double rho) {
    const CircleGrid grid(n);
    const int qmax = n / 4;
    double sup = 0;
    for (int c = 0; c < n; ++c) {
        for (int qb = 1; qb <= qmax; ++qb) {
            const int b = grid.wrap_index(c + qb);
            const double db = qb * grid.spacing();
            for (int qa = 1; qa <= qmax; ++qa) {
                const int a = grid.wrap_index(b + qa);
                const double da = qa * grid.spacing();
                const double den = std::pow(da, rho) * std::pow(db, mu - rho);
                sup = std::max(sup, max_abs(h(a, b, c)) / den);
            }
        }
    }
    return sup;
}

/// Max |delta_3 h| over a (sampled) set of quadruples; zero iff h is exact.
template <class H>
double exactness_defect(int n, const H& h, int max_samples = 20000) {
    double defect = 0;
    const long total = static_cast<long>(n) * n * n * n;
    if (total <= max_samples) {
        for (int t = 0; t < n; ++t)
            for (int u = 0; u < n; ++u)
                for (int v = 0; v < n; ++v)
                    for (int s = 0; s < n; ++s)
                        defect = std::max(defect, max_abs(delta3_at(h, t, u, v, s)));
    } else {
        std::mt19937_64 rng(0x5e1f5e1fULL);
        std::uniform_int_distribution<int> pick(0, n - 1);
        for (int it = 0; it < max_samples; ++it)
            defect = std::max(defect,
                              max_abs(delta3_at(h, pick(rng), pick(rng), pick(rng), pick(rng))));
    }
    return defect;
}

/// Discrete sewing map.  For delta_2-exact h with mu > 1 returns the grid
/// function F with delta_2 F = h exactly, normalized so that every adjacent
/// cell carries the same value.
///
/// The particular solution comes from the delta_3 cocycle identities alone:
/// F0(t,s) = h(t,o,s) - h(t,o,t) with o the base node.  The normalization
/// subtracts a delta_1-exact part so that all cells are equal.  On the
/// circle the cell values cannot all vanish: their loop sum is an invariant
/// of h (for h = delta_2 B it equals the loop sum of B over the cells), so
/// the sewing normalization spreads that obstruction uniformly; under
/// refinement of continuum data it is O(N^{1-mu}) and disappears.  On a
/// forward arc the value then telescopes into the dyadic compensated h-sum
/// plus the (uniform) cell share, which realizes the constructive bound
/// ||F||_mu <= (2^mu - 2)^{-1} ||h||_{mu/2,mu/2} up to that vanishing share.
template <class T, class H>
TwoParamGrid<T> sewing(int n, const H& h, double mu, double exact_rel_tol = 1e-8) {
    if (mu <= 1.0) throw ExponentOutOfRange("sewing: mu must exceed 1");
    const CircleGrid grid(n);

    // scale for the exactness tolerance: typical magnitude of h itself
    double scale = 0;
    for (int t = 0; t < n; t += std::max(1, n / 16))
        for (int u = 0; u < n; u += std::max(1, n / 16))
            for (int s = 0; s < n; s += std::max(1, n / 16))
                scale = std::max(scale, max_abs(h(t, u, s)));
    const double defect = exactness_defect(n, h);
    if (defect > exact_rel_tol * std::max(scale, 1e-300))
        throw NotExact("sewing: input is not delta_2-exact (defect " + std::to_string(defect) + ")");

    auto f0 = [&h](int t, int s) { return h(t, 0, s) - h(t, 0, t); };
    // cell values of the particular solution and their uniform share
    std::vector<T> cell(n);
    for (int i = 0; i < n; ++i) cell[i] = f0(grid.wrap_index(i + 1), i);
    T total = cell[0];
    for (int i = 1; i < n; ++i) total += cell[i];
    const T share = total * (1.0 / n);
    std::vector<T> g(n, total - total);  // zero of T
    for (int i = 0; i + 1 < n; ++i) g[i + 1] = g[i] + cell[i] - share;

    TwoParamGrid<T> f(n, T{});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) f(i, j) = f0(i, j) - (g[i] - g[j]);
    return f;
}

}  // namespace rfil
