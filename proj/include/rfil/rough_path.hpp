// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <random>
#include <vector>

#include "rfil/cochain.hpp"

namespace rfil {

/// A nu-rough path over the circle: first level X (a closed grid curve) and
/// the second level X^2 satisfying the Chen relation.
///
/// Area convention (see chen_rhs): X^2(t,s) = int_s^t (X_r - X_s) (x) dX_r,
/// the second argument being base point and lower limit, with the integral
/// taken in the chart [0,1).  The whole grid is generated from the chart
/// prefix integrals m(i) = int_0^{xi_i} X (x) dX, which makes
///
///     X^2(i,j) = m(i) - m(j) - X(j) (x) (X(i) - X(j))
///
/// an O(1) evaluation and the Chen relation an exact algebraic identity.
class RoughPath {
public:
    RoughPath(GridFn<Vec3> x, double nu, std::vector<Mat3> cell_areas,
              std::vector<Mat3> prefix)
        : grid_(static_cast<int>(x.size())),
          nu_(nu),
          x_(std::move(x)),
          cells_(std::move(cell_areas)),
          prefix_(std::move(prefix)) {}

    const CircleGrid& grid() const { return grid_; }
    int size() const { return grid_.size(); }
    double nu() const { return nu_; }
    const GridFn<Vec3>& x() const { return x_; }
    const Vec3& x(int i) const { return x_[grid_.wrap_index(i)]; }
    Vec3 increment(int i) const { return x(i + 1) - x(i); }

    /// Cell area X^2(i+1, i).
    const Mat3& cell(int i) const { return cells_[grid_.wrap_index(i)]; }

    /// X^2(i, j) for arbitrary node pair.
    Mat3 area(int i, int j) const {
        const int a = grid_.wrap_index(i), b = grid_.wrap_index(j);
        return prefix_[a] - prefix_[b] - outer(x_[b], x_[a] - x_[b]);
    }

    /// Full-loop second level; its antisymmetric part is the Levy area.
    Mat3 full_loop_area() const { return prefix_.back(); }

    double holder_x() const {
        if (holder_x_ < 0) holder_x_ = holder_norm_1(x_, nu_, PairRange::half).value;
        return holder_x_;
    }
    double holder_area() const {
        if (holder_area_ < 0) {
            double sup = 0;
            const int n = size();
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    if (i == j) continue;
                    double d = grid_.node_distance(i, j);
                    if (d > 0.25) continue;
                    sup = std::max(sup, max_abs(area(i, j)) / std::pow(d, 2 * nu_));
                }
            holder_area_ = sup;
        }
        return holder_area_;
    }

    /// Dense second level (9 N^2 scalars); N <= 1024 enforced here only.
    TwoParamGrid<Mat3> dense_area() const {
        if (size() > 1024) throw Error("RoughPath: dense area grid limited to N <= 1024");
        TwoParamGrid<Mat3> g(size(), Mat3::Zero());
        for (int i = 0; i < size(); ++i)
            for (int j = 0; j < size(); ++j)
                if (i != j) g(i, j) = area(i, j);
        return g;
    }

    /// Magnitude scale of the second level, for relative tolerances.
    double area_scale() const {
        double s = 0;
        const int n = size(), stride = std::max(1, n / 64);
        for (int i = 0; i < n; i += stride)
            for (int j = 0; j < n; j += stride)
                if (i != j) s = std::max(s, max_abs(area(i, j)));
        for (int i = 0; i < n; ++i) s = std::max(s, max_abs(cells_[i]));
        return s;
    }

    static Mat3 outer(const Vec3& a, const Vec3& b) { return a * b.transpose(); }

private:
    CircleGrid grid_;
    double nu_;
    GridFn<Vec3> x_;
    std::vector<Mat3> cells_;
    std::vector<Mat3> prefix_;  // size N+1, prefix_[0] = 0, prefix_[N] = full loop
    mutable double holder_x_ = -1;
    mutable double holder_area_ = -1;
};

/// Canonical geometric lift of a sampled closed curve: the curve is read as
/// piecewise linear, so each cell carries the Young area (1/2) dX (x) dX and
/// longer spans are assembled through the chart prefix integrals.  The Chen
/// relation holds to machine precision by construction.
inline std::shared_ptr<const RoughPath> lift_piecewise_linear(
    const GridFn<Vec3>& samples, double nu, bool require_positive_segments = false) {
    const int n = static_cast<int>(samples.size());
    CircleGrid grid(n);
    std::vector<Mat3> cells(n);
    std::vector<Mat3> prefix(n + 1);
    prefix[0].setZero();
    for (int i = 0; i < n; ++i) {
        const Vec3 dx = samples[grid.wrap_index(i + 1)] - samples[i];
        if (require_positive_segments && dx.norm() == 0.0)
            throw DegenerateCurve("lift_piecewise_linear: zero-length segment at node " +
                                  std::to_string(i));
        cells[i] = 0.5 * dx * dx.transpose();
        // segment integral of X (x) dX over one linear cell
        prefix[i + 1] = prefix[i] + samples[i] * dx.transpose() + cells[i];
    }
    return std::make_shared<RoughPath>(samples, nu, std::move(cells), std::move(prefix));
}

/// Right-hand side of the Chen relation under the adopted area convention:
/// delta_2 X^2(xi,eta,rho) = (X(eta)-X(rho)) (x) (X(xi)-X(eta)).
inline Mat3 chen_rhs(const RoughPath& rp, int xi, int eta, int rho) {
    return (rp.x(eta) - rp.x(rho)) * (rp.x(xi) - rp.x(eta)).transpose();
}

/// Max Chen defect |delta_2 X^2 - chen_rhs| over grid triples (all triples
/// for N <= 64, a deterministic sample otherwise).
inline double chen_defect(const RoughPath& rp) {
    const int n = rp.size();
    auto defect_at = [&](int t, int u, int s) {
        Mat3 d = rp.area(t, s) - rp.area(t, u) - rp.area(u, s) - chen_rhs(rp, t, u, s);
        return max_abs(d);
    };
    double worst = 0;
    if (n <= 64) {
        for (int t = 0; t < n; ++t)
            for (int u = 0; u < n; ++u)
                for (int s = 0; s < n; ++s) worst = std::max(worst, defect_at(t, u, s));
    } else {
        const int stride = std::max(1, n / 32);
        for (int t = 0; t < n; t += stride)
            for (int u = 0; u < n; u += stride)
                for (int s = 0; s < n; s += stride) worst = std::max(worst, defect_at(t, u, s));
        std::mt19937_64 rng(0xc4e2);
        std::uniform_int_distribution<int> pick(0, n - 1);
        for (int it = 0; it < 50000; ++it)
            worst = std::max(worst, defect_at(pick(rng), pick(rng), pick(rng)));
    }
    return worst;
}

/// Chen defect of a perturbed copy (fault injection for the check battery).
inline double chen_defect_with_perturbation(const RoughPath& rp, int i, int j, double eps) {
    const int n = rp.size();
    auto pert_area = [&](int a, int b) {
        Mat3 m = rp.area(a, b);
        if (a == i && b == j) m(0, 0) += eps;
        return m;
    };
    double worst = 0;
    for (int t = 0; t < n && t < 64; ++t)
        for (int u = 0; u < n && u < 64; ++u)
            for (int s = 0; s < n && s < 64; ++s) {
                Mat3 d = pert_area(t, s) - pert_area(t, u) - pert_area(u, s) -
                         chen_rhs(rp, t, u, s);
                worst = std::max(worst, max_abs(d));
            }
    return worst;
}

}  // namespace rfil
