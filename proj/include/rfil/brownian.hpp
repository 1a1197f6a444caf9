// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "rfil/circle_grid.hpp"
#include "rfil/cochain.hpp"

namespace rfil {

/// Deterministic standard-normal source (Box-Muller over mt19937_64), so that
/// a seed pins the sampled curve independent of the standard library's
/// normal_distribution implementation.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (have_) {
            have_ = false;
            return cached_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(2.0 * M_PI * u2);
        have_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    Vec3 vec3() {
        Vec3 v;
        v << (*this)(), (*this)(), (*this)();
        return v;
    }

private:
    double uniform01() {
        // in (0,1], so log() is safe
        return (static_cast<double>(rng_()) + 1.0) * (1.0 / 18446744073709551616.0);
    }
    std::mt19937_64 rng_;
    double cached_ = 0;
    bool have_ = false;
};

/// Samples of a three dimensional Brownian bridge with B(0) = B(1) = x0 on
/// the dyadic grid, by midpoint construction: the midpoint of (s,t) given the
/// endpoints is Gaussian with mean the average and variance (t-s)/4 per
/// coordinate.  This realizes the exact bridge covariance min(s,t) - st on
/// the grid.  Returns N samples (node N would again equal x0).
inline GridFn<Vec3> sample_brownian_bridge(int n_points, std::uint64_t seed,
                                           const Vec3& basepoint = Vec3::Zero(),
                                           double scale = 1.0) {
    CircleGrid grid(n_points);  // validates power of two, >= 8
    const int n = n_points;
    std::vector<Vec3> b(n + 1, Vec3::Zero());
    GaussianSource gauss(seed);
    for (int step = n; step > 1; step /= 2) {
        const int half = step / 2;
        const double sd = std::sqrt(static_cast<double>(step) / n / 4.0);
        for (int i = 0; i < n; i += step)
            b[i + half] = 0.5 * (b[i] + b[i + step]) + sd * gauss.vec3();
    }
    GridFn<Vec3> out(n);
    for (int i = 0; i < n; ++i) out[i] = basepoint + scale * b[i];
    return out;
}

}  // namespace rfil
