// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include "rfil/rough_path.hpp"

namespace rfil {

/// Path weakly controlled by the base rough path X, with values in R^D:
/// Y(xi) - Y(eta) = Y'(eta) (X(xi) - X(eta)) + R(xi, eta).
/// The remainder is always derived from this identity, never stored as an
/// independent degree of freedom.
template <int D>
struct Controlled {
    using Val = Eigen::Matrix<double, D, 1>;
    using Prime = Eigen::Matrix<double, D, 3>;

    std::shared_ptr<const RoughPath> base;
    GridFn<Val> y;
    std::vector<Prime> y_prime;

    int size() const { return static_cast<int>(y.size()); }
    Val remainder(int i, int j) const {
        return y[i] - y[j] - y_prime[j] * (base->x(i) - base->x(j));
    }
};

using ControlledVec = Controlled<3>;
using ControlledScalar = Controlled<1>;

template <int D>
Controlled<D> make_controlled(GridFn<typename Controlled<D>::Val> y,
                              std::vector<typename Controlled<D>::Prime> y_prime,
                              std::shared_ptr<const RoughPath> base) {
    if (!base) throw GridMismatch("make_controlled: missing base");
    if (static_cast<int>(y.size()) != base->size() || y.size() != y_prime.size())
        throw GridMismatch("make_controlled: grid sizes differ");
    return Controlled<D>{std::move(base), std::move(y), std::move(y_prime)};
}

inline ControlledVec make_controlled(GridFn<Vec3> y, std::vector<Mat3> y_prime,
                                     std::shared_ptr<const RoughPath> base) {
    return make_controlled<3>(std::move(y), std::move(y_prime), std::move(base));
}

/// X viewed as controlled by itself: Y = X, Y' = identity, R = 0.
inline ControlledVec self_controlled(std::shared_ptr<const RoughPath> base) {
    std::vector<Mat3> prime(base->size(), Mat3::Identity());
    return ControlledVec{base, base->x(), std::move(prime)};
}

/// Scalar controlled path from plain double samples.
inline ControlledScalar make_scalar_controlled(const GridFn<double>& y,
                                               std::vector<RowVec3> y_prime,
                                               std::shared_ptr<const RoughPath> base) {
    GridFn<ControlledScalar::Val> v(y.size());
    for (size_t i = 0; i < y.size(); ++i) v[i](0) = y[i];
    return make_controlled<1>(std::move(v), std::move(y_prime), std::move(base));
}

template <int D>
TwoParamGrid<typename Controlled<D>::Val> remainder_grid(const Controlled<D>& c) {
    const int n = c.size();
    TwoParamGrid<typename Controlled<D>::Val> r(n, Controlled<D>::Val::Zero());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) r(i, j) = c.remainder(i, j);
    return r;
}

struct ControlledNorm {
    double seminorm = 0;      // |Y'|_{C^nu} + ||R||_{C_2^{2nu}}
    double full_norm = 0;     // seminorm + sup|Y|
    double prime_holder = 0;  // |Y'|_{C^nu}
    double remainder_holder = 0;
    double y_sup = 0;
    double y_holder = 0;       // measured |Y|_{C^nu}
    double y_holder_bound = 0; // full_norm (1 + |X|_{C^nu})
};

template <int D>
ControlledNorm controlled_norm(const Controlled<D>& c) {
    const double nu = c.base->nu();
    ControlledNorm out;
    GridFn<typename Controlled<D>::Prime> primes(c.y_prime.begin(), c.y_prime.end());
    out.prime_holder = holder_norm_1(primes, nu, PairRange::half).value;
    out.remainder_holder = holder_norm_2(remainder_grid(c), 2 * nu, PairRange::near).value;
    out.seminorm = out.prime_holder + out.remainder_holder;
    out.y_sup = sup_norm(c.y);
    out.full_norm = out.seminorm + out.y_sup;
    out.y_holder = holder_norm_1(c.y, nu, PairRange::half).value;
    out.y_holder_bound = out.full_norm * (1.0 + c.base->holder_x());
    return out;
}

}  // namespace rfil
