// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "rfil/controlled.hpp"

namespace rfil {

/// Matrix-valued controlled integrand (for fields like A(x - Y)): values in
/// L(R^3,R^3), Gubinelli derivative indexed by the base direction l:
/// prime[i][l](m,j) = d/dX_l of W_{mj} at node i.
struct ControlledMat {
    std::shared_ptr<const RoughPath> base;
    std::vector<Mat3> y;
    std::vector<Ten3> y_prime;
    int size() const { return static_cast<int>(y.size()); }
};

/// Explicit pairing of integrand values with dZ.  The second-order term of
/// the compensated sum contracts the two Gubinelli derivatives against the
/// base area: for output component m,
///     T2_m = sum_{a,b} P(W'[,a], Z'[,b])_m  X^2(cell)_{a b},
/// which is the index order that reproduces the Young limit on smooth data.
enum class Pairing { dot, scalar_vec, mat_vec };

template <class T>
struct IntegralResult {
    T total{};
    std::vector<T> prefix;  // chart prefix sums, prefix[0]=0 .. prefix[N]=total
    /// Signed partial over the chart from node j to node i.
    T partial(int i, int j) const {
        const int n = static_cast<int>(prefix.size()) - 1;
        auto w = [n](int k) { int m = k % n; return m < 0 ? m + n : m; };
        return prefix[w(i)] - prefix[w(j)];
    }
};

namespace detail {

inline void check_bases(const std::shared_ptr<const RoughPath>& a,
                        const std::shared_ptr<const RoughPath>& b) {
    if (a != b) throw BaseMismatch("rough_integral: integrands have different bases");
    if (3.0 * a->nu() <= 1.0)
        throw ExponentTooLow("rough_integral: need 3 nu > 1");
}

}  // namespace detail

/// Compensated Riemann sum of <W, dZ> over the full grid (dot pairing).
inline IntegralResult<double> rough_integral(const ControlledVec& w, const ControlledVec& z) {
    detail::check_bases(w.base, z.base);
    const RoughPath& X = *w.base;
    const int n = X.size();
    IntegralResult<double> res;
    res.prefix.assign(n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        const Vec3 dz = z.y[X.grid().wrap_index(i + 1)] - z.y[i];
        double term = w.y[i].dot(dz);
        const Mat3& cell = X.cell(i);
        // sum_{m,a,b} W'(m,a) Z'(m,b) cell(a,b)
        term += (w.y_prime[i] * cell * z.y_prime[i].transpose()).trace();
        res.prefix[i + 1] = res.prefix[i] + term;
    }
    res.total = res.prefix[n];
    return res;
}

/// Compensated sum of w dZ for scalar w (result is a vector).
inline IntegralResult<Vec3> rough_integral(const ControlledScalar& w, const ControlledVec& z) {
    detail::check_bases(w.base, z.base);
    const RoughPath& X = *w.base;
    const int n = X.size();
    IntegralResult<Vec3> res;
    res.prefix.assign(n + 1, Vec3::Zero());
    for (int i = 0; i < n; ++i) {
        const Vec3 dz = z.y[X.grid().wrap_index(i + 1)] - z.y[i];
        Vec3 term = w.y[i](0) * dz;
        const Mat3& cell = X.cell(i);
        // T2_m = sum_{a,b} W'(a) Z'(m,b) cell(a,b)
        term += z.y_prime[i] * cell.transpose() * w.y_prime[i].transpose();
        res.prefix[i + 1] = res.prefix[i] + term;
    }
    res.total = res.prefix[n];
    return res;
}

/// Compensated sum of W dZ for matrix W acting on the increment.
inline IntegralResult<Vec3> rough_integral(const ControlledMat& w, const ControlledVec& z) {
    detail::check_bases(w.base, z.base);
    const RoughPath& X = *w.base;
    const int n = X.size();
    IntegralResult<Vec3> res;
    res.prefix.assign(n + 1, Vec3::Zero());
    for (int i = 0; i < n; ++i) {
        const Vec3 dz = z.y[X.grid().wrap_index(i + 1)] - z.y[i];
        Vec3 term = w.y[i] * dz;
        const Mat3& cell = X.cell(i);
        // T2_m = sum_{j,a,b} W'_a(m,j) Z'(j,b) cell(a,b)
        for (int a = 0; a < 3; ++a) {
            const Vec3 zc = z.y_prime[i] * cell.row(a).transpose();  // zc_j = sum_b Z'(j,b) cell(a,b)
            term += w.y_prime[i][a] * zc;
        }
        res.prefix[i + 1] = res.prefix[i] + term;
    }
    res.total = res.prefix[n];
    return res;
}

/// First-order Riemann-Stieltjes (Young) sums, the smooth-mode oracle.
inline double young_integral(const GridFn<Vec3>& w, const GridFn<Vec3>& z, double nu) {
    if (nu <= 0.5) throw ExponentTooLow("young_integral: need nu > 1/2");
    const int n = static_cast<int>(w.size());
    double s = 0;
    for (int i = 0; i < n; ++i) s += w[i].dot(z[(i + 1) % n] - z[i]);
    return s;
}

inline Vec3 young_integral(const GridFn<double>& w, const GridFn<Vec3>& z, double nu) {
    if (nu <= 0.5) throw ExponentTooLow("young_integral: need nu > 1/2");
    const int n = static_cast<int>(w.size());
    Vec3 s = Vec3::Zero();
    for (int i = 0; i < n; ++i) s += w[i] * (z[(i + 1) % n] - z[i]);
    return s;
}

/// Q(eta,xi) = int_xi^eta W dZ - W(xi)(Z(eta)-Z(xi)) - W'(xi) Z'(xi) X^2(eta,xi):
/// the local expansion error of the compensated sum (dot pairing).
inline TwoParamGrid<double> q_grid(const IntegralResult<double>& res, const ControlledVec& w,
                                   const ControlledVec& z) {
    const RoughPath& X = *w.base;
    const int n = X.size();
    TwoParamGrid<double> q(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const Mat3 a = X.area(i, j);
            double v = res.partial(i, j) - w.y[j].dot(z.y[i] - z.y[j]) -
                       (w.y_prime[j] * a * z.y_prime[j].transpose()).trace();
            q(i, j) = v;
        }
    return q;
}

struct QRemainderReport {
    double q_norm = 0;          // ||Q||_{C_2^{3nu}}
    double rhs_without_c = 0;   // (1+|X|+|X^2|) ||W||_D ||Z||_D
    double fitted_c = 0;        // q_norm / rhs_without_c
};

inline QRemainderReport q_remainder(const IntegralResult<double>& res, const ControlledVec& w,
                                    const ControlledVec& z) {
    const double nu = w.base->nu();
    QRemainderReport rep;
    rep.q_norm = holder_norm_2(q_grid(res, w, z), 3 * nu, PairRange::near).value;
    const double nw = controlled_norm(w).full_norm;
    const double nz = controlled_norm(z).full_norm;
    rep.rhs_without_c = (1.0 + w.base->holder_x() + w.base->holder_area()) * nw * nz;
    rep.fitted_c = rep.rhs_without_c > 0 ? rep.q_norm / rep.rhs_without_c : 0.0;
    return rep;
}

}  // namespace rfil
