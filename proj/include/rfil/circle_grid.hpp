// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "rfil/errors.hpp"
#include "rfil/geometry.hpp"

namespace rfil {

/// Distance on S^1 identified with [0,1).
inline double circle_distance(double a, double b) {
    double d = std::abs(a - b);
    return std::min(d, 1.0 - d);
}

/// Uniform grid of the circle, xi_i = i/N.  N is a power of two so that
/// dyadic refinement and the sewing construction stay on-grid.
class CircleGrid {
public:
    explicit CircleGrid(int n_points) : n_(n_points) {
        if (n_ < 8) throw Error("CircleGrid: need N >= 8");
        if (!is_power_of_two(n_)) throw Error("CircleGrid: N must be a power of two");
    }

    int size() const { return n_; }
    double spacing() const { return 1.0 / n_; }
    double node(int i) const { return wrap_index(i) * spacing(); }
    int wrap_index(int i) const {
        int m = i % n_;
        return m < 0 ? m + n_ : m;
    }
    /// Cells in the forward arc from node j to node i.
    int forward_span(int i, int j) const { return wrap_index(i - j); }
    /// Circle distance between nodes i and j in units of the chart.
    double node_distance(int i, int j) const {
        int s = forward_span(i, j);
        return std::min(s, n_ - s) * spacing();
    }

    bool operator==(const CircleGrid& o) const { return n_ == o.n_; }

private:
    int n_;
};

}  // namespace rfil
