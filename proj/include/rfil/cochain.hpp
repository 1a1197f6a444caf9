// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <random>
#include <vector>

#include "rfil/circle_grid.hpp"
#include "rfil/errors.hpp"
#include "rfil/geometry.hpp"

namespace rfil {

/// One-parameter grid function (an element of C_1 sampled at the nodes).
template <class T>
using GridFn = std::vector<T>;

/// Dense two-parameter grid function with zero diagonal (C_2 sampled at node
/// pairs).  values(i,j) corresponds to f(xi_i, xi_j).
template <class T>
class TwoParamGrid {
public:
    TwoParamGrid() : n_(0) {}
    explicit TwoParamGrid(int n, const T& init = T{}) : n_(n), v_(static_cast<size_t>(n) * n, init) {}

    int size() const { return n_; }
    T& operator()(int i, int j) { return v_[static_cast<size_t>(idx(i)) * n_ + idx(j)]; }
    const T& operator()(int i, int j) const { return v_[static_cast<size_t>(idx(i)) * n_ + idx(j)]; }

    double max_abs_entry() const {
        double m = 0;
        for (const auto& t : v_) m = std::max(m, max_abs(t));
        return m;
    }

private:
    int idx(int i) const {
        int m = i % n_;
        return m < 0 ? m + n_ : m;
    }
    int n_;
    std::vector<T> v_;
};

/// delta_1 g (t,s) = g(t) - g(s)
template <class T>
TwoParamGrid<T> delta1(const GridFn<T>& g) {
    const int n = static_cast<int>(g.size());
    TwoParamGrid<T> out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = g[i] - g[j];
    return out;
}

/// delta_2 h (t,u,s) = h(t,s) - h(t,u) - h(u,s), evaluated lazily.
template <class T>
class Delta2 {
public:
    explicit Delta2(const TwoParamGrid<T>& h) : h_(h) {}
    T operator()(int t, int u, int s) const { return h_(t, s) - h_(t, u) - h_(u, s); }
    int size() const { return h_.size(); }

private:
    const TwoParamGrid<T>& h_;
};

template <class T>
Delta2<T> delta2(const TwoParamGrid<T>& h) {
    return Delta2<T>(h);
}

/// delta_3 h (t,u,v,s) = -h(u,v,s) + h(t,v,s) - h(t,u,s) + h(t,u,v)
/// for a three-parameter callable h(i,j,k).
template <class H>
auto delta3_at(const H& h, int t, int u, int v, int s) {
    return -h(u, v, s) + h(t, v, s) - h(t, u, s) + h(t, u, v);
}

template <class T>
double max_abs_delta2(const Delta2<T>& d2) {
    const int n = d2.size();
    double m = 0;
    for (int t = 0; t < n; ++t)
        for (int u = 0; u < n; ++u)
            for (int s = 0; s < n; ++s) m = std::max(m, max_abs(d2(t, u, s)));
    return m;
}

/// Which node pairs enter a Holder-norm sup.  Near-diagonal restriction
/// (<= 1/4) is used on the 2nu/3nu scales and for the sewing bound; the
/// single-parameter nu scale uses all pairs.
enum class PairRange {
    half,          // all pairs (circle distance <= 1/2 automatically)
    near,          // circle distance <= 1/4
    forward_near,  // forward arc from second to first argument <= 1/4
};

struct HolderNorm {
    double exponent = 0;
    double value = 0;
};

/// |f|_mu = sup |f(a,b)| / d(a,b)^mu over the selected pair range.
template <class T>
HolderNorm holder_norm_2(const TwoParamGrid<T>& f, double mu,
                         PairRange range = PairRange::near) {
    if (mu <= 0) throw ExponentOutOfRange("holder_norm_2: mu must be positive");
    const int n = f.size();
    const CircleGrid grid(n);
    double sup = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double d;
            if (range == PairRange::forward_near) {
                int span = grid.forward_span(i, j);
                d = span * grid.spacing();
                if (d > 0.25) continue;
            } else {
                d = grid.node_distance(i, j);
                if (range == PairRange::near && d > 0.25) continue;
            }
            sup = std::max(sup, max_abs(f(i, j)) / std::pow(d, mu));
        }
    }
    return {mu, sup};
}

/// |g|_{C^nu} for a one-parameter grid function: sup of increments.
template <class T>
HolderNorm holder_norm_1(const GridFn<T>& g, double nu,
                         PairRange range = PairRange::half) {
    return holder_norm_2(delta1(g), nu, range);
}

template <class T>
double sup_norm(const GridFn<T>& g) {
    double m = 0;
    for (const auto& t : g) m = std::max(m, max_abs(t));
    return m;
}

}  // namespace rfil
