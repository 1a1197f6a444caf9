// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>

#include "rfil/evolution.hpp"
#include "rfil/scenario.hpp"
#include "rfil/sewing.hpp"

namespace rfil {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0;      // measured quantity
    double threshold = 0;  // pass bound on the value
    double seconds = 0;
};

struct FaultInjection {
    bool perturb_area = false;   // makes the Chen check fail
    bool negate_phihat = false;  // makes hypothesis clause (ii) fail
};

/// The structural-invariant battery run by the `validate` CLI verb and the
/// smoke layer of the acceptance suite.
inline std::vector<CheckResult> validate_suite(const FaultInjection& fault = {}) {
    std::vector<CheckResult> out;
    auto timed = [&out](const std::string& name, auto&& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        auto [value, threshold] = fn();
        CheckResult r;
        r.name = name;
        r.value = value;
        r.threshold = threshold;
        r.pass = value <= threshold;
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(r);
    };

    timed("cochain_exactness", [] {
        std::mt19937_64 rng(1);
        std::normal_distribution<double> g;
        const int n = 64;
        double worst = 0, scale = 0;
        for (int rep = 0; rep < 5; ++rep) {
            GridFn<Vec3> f(n);
            for (auto& v : f) v = Vec3(g(rng), g(rng), g(rng));
            scale = std::max(scale, sup_norm(f));
            worst = std::max(worst, max_abs_delta2(delta2(delta1(f))));
        }
        return std::pair{worst, 1e-13 * scale};
    });

    timed("sewing_bound", [] {
        std::mt19937_64 rng(2);
        std::normal_distribution<double> g;
        const int n = 32;
        const double mu = 1.2;
        double worst_ratio = 0;
        for (int rep = 0; rep < 3; ++rep) {
            TwoParamGrid<double> b(n, 0.0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j) b(i, j) = g(rng);
            auto h = [&](int t, int u, int s) { return b(t, s) - b(t, u) - b(u, s); };
            const auto lam = sewing<double>(n, h, mu);
            const double lhs = holder_norm_2(lam, mu, PairRange::forward_near).value;
            const double rhs = c3_holder_norm(n, h, mu, mu / 2) / (std::pow(2.0, mu) - 2.0);
            worst_ratio = std::max(worst_ratio, lhs / rhs);
        }
        return std::pair{worst_ratio, 1.0 + 1e-12};
    });

    timed("chen_relation", [&fault] {
        auto rp = lift_piecewise_linear(circle_curve(128), 0.9);
        double defect = chen_defect(*rp);
        if (fault.perturb_area)
            defect = chen_defect_with_perturbation(*rp, 3, 11, 1e-6);
        auto rpb = lift_piecewise_linear(sample_brownian_bridge(128, 1, Vec3::Zero(), 0.5), 0.4);
        defect = std::max(defect, chen_defect(*rpb));
        const double scale = std::max(rp->area_scale(), rpb->area_scale());
        return std::pair{defect, 1e-12 * scale};
    });

    timed("young_agreement", [] {
        const int n = 512;
        const double nu = 0.9;
        auto base = lift_piecewise_linear(circle_curve(n), nu);
        auto c = self_controlled(base);
        KernelSpec ker(1.0, 0.5);
        const Vec3 x0(0.3, 0.2, 0.4);
        GridFn<double> w(n);
        std::vector<RowVec3> wp(n);
        for (int i = 0; i < n; ++i) {
            const auto kd = ker.eval(x0 - c.y[i], 1);
            w[i] = kd.phi;
            wp[i] = -kd.grad.transpose() * c.y_prime[i];
        }
        const Vec3 rough = rough_integral(make_scalar_controlled(w, wp, base), c).total;
        // Young oracle, Richardson-refined to kill its own O(1/N) bias
        auto young_at = [&](int nf) {
            auto fine = circle_curve(nf);
            GridFn<double> wf(nf);
            for (int i = 0; i < nf; ++i) wf[i] = ker.eval(x0 - fine[i], 0).phi;
            return young_integral(wf, fine, nu);
        };
        const Vec3 oracle = 2.0 * young_at(16384) - young_at(8192);
        return std::pair{(rough - oracle).norm() / oracle.norm(), 1e-3};
    });

    timed("kernel_hypothesis", [&fault] {
        KernelSpec ker(1.0, 1.0);
        SpectralTable t = ker.spectral_table();
        if (fault.negate_phihat)
            for (auto& v : t.phihat) v = -v;
        const auto rep = ker.validate(t);
        const double fails = (rep.evenness_pass ? 0 : 1) + (rep.positivity_pass ? 0 : 1) +
                             (rep.finiteness_pass ? 0 : 1) + (rep.parseval_pass ? 0 : 1);
        return std::pair{fails, 0.5};
    });

    timed("energy_agreement", [] {
        auto c = self_controlled(lift_piecewise_linear(circle_curve(128), 0.9));
        const auto rep = energy_report(c, KernelSpec(1.0, 1.0));
        return std::pair{rep.agreement, 1e-3};
    });

    timed("energy_positivity", [] {
        KernelSpec ker(1.0, 1.0);
        double worst = 0;
        for (int seed = 0; seed < 5; ++seed) {
            auto c = self_controlled(lift_piecewise_linear(
                sample_brownian_bridge(128, seed, Vec3::Zero(), 0.5), 0.4));
            worst = std::min(worst, energy_rough(c, ker));
        }
        return std::pair{-worst, 1e-9};
    });

    timed("velocity_structure", [] {
        auto c = self_controlled(lift_piecewise_linear(circle_curve(128), 0.9));
        KernelSpec ker(1.0, 1.0);
        std::mt19937_64 rng(5);
        std::normal_distribution<double> g;
        double worst = 0;
        for (int it = 0; it < 5; ++it) {
            const Vec3 x(g(rng), g(rng), 0.5 * g(rng));
            const auto v = velocity(c, ker, x, 1);
            worst = std::max(worst, std::abs(divergence_fd(c, ker, x)) /
                                        std::max(v.grad_u.cwiseAbs().maxCoeff(), 1e-300));
            const Vec3 curl = curl_potential_fd(c, ker, x);
            worst = std::max(worst, (curl - v.u).norm() / std::max(v.u.norm(), 1e-300));
        }
        return std::pair{worst, 1e-5};
    });

    timed("velocity_bound", [] {
        KernelSpec ker(1.0, 1.0);
        double worst = 0;
        for (int n = 0; n <= 1; ++n) {
            auto c = self_controlled(lift_piecewise_linear(circle_curve(128), 0.9));
            worst = std::max(worst, velocity_bound_check(c, ker, n).ratio);
            auto cb = self_controlled(lift_piecewise_linear(
                sample_brownian_bridge(128, 3, Vec3::Zero(), 0.5), 0.4));
            worst = std::max(worst, velocity_bound_check(cb, ker, n).ratio);
        }
        return std::pair{worst, 1.0 + 1e-9};
    });

    timed("conservation_smoke", [] {
        auto st = make_state(circle_curve(64), 0.9);
        EvolveOptions opts;
        opts.horizon = 0.05;
        opts.dt = 2.5e-3;
        opts.diagnostics_every = 5;
        const auto diag = evolve(st, KernelSpec(1.0, 1.0), opts);
        return std::pair{diag.energy_drift(), 1e-8};
    });

    return out;
}

}  // namespace rfil
