// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "rfil/fields.hpp"

namespace rfil {

enum class Scheme { euler, rk4 };

inline const char* scheme_name(Scheme s) { return s == Scheme::euler ? "euler" : "rk4"; }

/// Evolution state of d gamma/dt = u^gamma(gamma).
///
/// Rough mode (nu <= 1/2): the base rough path is gamma_0's lift, fixed for
/// the whole run, and (gamma, gamma') evolve jointly; the remainder is always
/// recomputed from the controlled-path identity.
///
/// Smooth mode (nu > 1/2): the second level is uniquely determined by the
/// curve (Young regime), so the state is kept self-controlled: after every
/// step the base is re-lifted from the current curve and gamma' is the
/// identity.  Evolving gamma' over a fixed base instead injects an
/// O(N^-2)-scale symmetry defect into the compensated sums that shows up as
/// spurious energy drift; re-basing keeps the discrete flow exactly
/// symmetric on symmetric curves.
struct FilamentState {
    double t = 0;
    bool smooth_mode = false;
    std::shared_ptr<const RoughPath> base;
    GridFn<Vec3> gamma;
    std::vector<Mat3> gamma_prime;

    ControlledVec controlled() const { return ControlledVec{base, gamma, gamma_prime}; }
    int size() const { return static_cast<int>(gamma.size()); }
};

inline FilamentState make_state(const GridFn<Vec3>& samples, double nu) {
    FilamentState st;
    st.smooth_mode = nu > 0.5;
    st.base = lift_piecewise_linear(samples, nu);
    st.gamma = samples;
    st.gamma_prime.assign(samples.size(), Mat3::Identity());
    return st;
}

struct Rhs {
    GridFn<Vec3> dgamma;
    std::vector<Mat3> dgamma_prime;
};

/// dgamma/dt(xi) = u^gamma(gamma(xi)); dgamma'/dt(xi) = grad u(gamma(xi)) gamma'(xi).
inline Rhs rhs(const FilamentState& st, const KernelSpec& kernel) {
    const ControlledVec c = st.controlled();
    const int n = st.size();
    Rhs out;
    out.dgamma.resize(n);
    out.dgamma_prime.resize(n);
    for (int i = 0; i < n; ++i) {
        const VelocityEvaluation v = velocity(c, kernel, st.gamma[i], 1);
        out.dgamma[i] = v.u;
        out.dgamma_prime[i] = v.grad_u * st.gamma_prime[i];
    }
    return out;
}

namespace detail {

inline FilamentState state_like(const FilamentState& st, GridFn<Vec3> gamma,
                                std::vector<Mat3> gp) {
    FilamentState s = st;
    if (st.smooth_mode) {
        s.base = lift_piecewise_linear(gamma, st.base->nu());
        s.gamma = std::move(gamma);
        s.gamma_prime.assign(s.gamma.size(), Mat3::Identity());
    } else {
        s.gamma = std::move(gamma);
        s.gamma_prime = std::move(gp);
    }
    return s;
}

inline void axpy(GridFn<Vec3>& y, double a, const GridFn<Vec3>& x) {
    for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}
inline void axpy(std::vector<Mat3>& y, double a, const std::vector<Mat3>& x) {
    for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace detail

inline FilamentState step(const FilamentState& st, const KernelSpec& kernel, double dt,
                          Scheme scheme) {
    if (dt < 0) throw Error("step: dt must be nonnegative");
    const int n = st.size();
    GridFn<Vec3> g = st.gamma;
    std::vector<Mat3> gp = st.gamma_prime;
    if (dt > 0) {
        if (scheme == Scheme::euler) {
            const Rhs k1 = rhs(st, kernel);
            detail::axpy(g, dt, k1.dgamma);
            detail::axpy(gp, dt, k1.dgamma_prime);
        } else {
            auto stage = [&](const Rhs& k, double h) {
                GridFn<Vec3> sg = st.gamma;
                std::vector<Mat3> sgp = st.gamma_prime;
                detail::axpy(sg, h, k.dgamma);
                detail::axpy(sgp, h, k.dgamma_prime);
                return detail::state_like(st, std::move(sg), std::move(sgp));
            };
            const Rhs k1 = rhs(st, kernel);
            const Rhs k2 = rhs(stage(k1, 0.5 * dt), kernel);
            const Rhs k3 = rhs(stage(k2, 0.5 * dt), kernel);
            const Rhs k4 = rhs(stage(k3, dt), kernel);
            for (int i = 0; i < n; ++i) {
                g[i] += dt / 6.0 *
                        (k1.dgamma[i] + 2 * k2.dgamma[i] + 2 * k3.dgamma[i] + k4.dgamma[i]);
                gp[i] += dt / 6.0 *
                         (k1.dgamma_prime[i] + 2 * k2.dgamma_prime[i] + 2 * k3.dgamma_prime[i] +
                          k4.dgamma_prime[i]);
            }
        }
    }
    for (int i = 0; i < n; ++i)
        if (!g[i].allFinite() || !gp[i].allFinite())
            throw StepRejected("step: non-finite state at node " + std::to_string(i));
    FilamentState out = detail::state_like(st, std::move(g), std::move(gp));
    out.t = st.t + dt;
    return out;
}

struct DiagnosticsSample {
    double t = 0;
    double energy = 0;
    double sup_gamma = 0;
    double sup_gamma_prime = 0;
    double holder_gamma = 0;
    double holder_gamma_prime = 0;
    double remainder_2nu = 0;
    double remainder_evolution_gap = -1;  // <0: check disabled
};

struct EnvelopeConstants {
    double h0 = 0;                 // conserved energy at t = 0
    double b0 = 0, b1 = 0, b2 = 0; // (2 pi)^{-3/2} sqrt(2 M_n H0)
    double sup_gamma0 = 0, sup_gp0 = 0, holder_gamma0 = 0, r0 = 0;
};

struct RunDiagnostics {
    std::vector<DiagnosticsSample> samples;
    EnvelopeConstants consts;
    double nu = 0;
    int steps = 0;
    double dt = 0;
    Scheme scheme = Scheme::rk4;

    double energy_drift() const {
        if (samples.empty()) return 0;
        const double h0 = samples.front().energy;
        double worst = 0;
        for (const auto& s : samples)
            worst = std::max(worst, std::abs(s.energy - h0));
        return worst / std::max(std::abs(h0), 1e-300);
    }
};

struct EvolveOptions {
    double horizon = 1.0;
    double dt = 1e-3;
    Scheme scheme = Scheme::rk4;
    int diagnostics_every = 10;
    double blowup_factor = 1e6;
    bool check_remainder_evolution = false;
    int remainder_pairs = 48;
    std::function<void(const FilamentState&)> snapshot_sink;
    int snapshot_every = 0;
};

namespace detail {

/// The induced velocity field as a smooth map, for the remainder-evolution
/// consistency check (Jacobian = grad u).
struct VelocityFieldMap final : SmoothMap<3> {
    const ControlledVec* c;
    const KernelSpec* kernel;
    VelocityFieldMap(const ControlledVec& cc, const KernelSpec& k) : c(&cc), kernel(&k) {}
    Vec3 value(const Vec3& x) const override { return velocity(*c, *kernel, x, 0).u; }
    Mat3 jacobian(const Vec3& x) const override { return velocity(*c, *kernel, x, 1).grad_u; }
};

}  // namespace detail

/// March to the horizon, recording diagnostics; throws BlowUpSuspected when
/// |gamma'| grows by blowup_factor (a discretization failure, not a true
/// blow-up, per the global theory).
inline RunDiagnostics evolve(FilamentState state, const KernelSpec& kernel,
                             const EvolveOptions& opts) {
    if (opts.horizon <= 0) throw Error("evolve: horizon must be positive");
    const int n_steps = static_cast<int>(std::llround(opts.horizon / opts.dt));
    if (std::abs(n_steps * opts.dt - opts.horizon) > 1e-9 * opts.horizon)
        throw Error("evolve: dt must divide the horizon");

    RunDiagnostics diag;
    diag.nu = state.base->nu();
    diag.steps = n_steps;
    diag.dt = opts.dt;
    diag.scheme = opts.scheme;

    // sampled pair set for the remainder-evolution cross-check
    std::vector<std::pair<int, int>> pairs;
    if (opts.check_remainder_evolution && state.smooth_mode)
        throw Error("evolve: the remainder-evolution check applies to rough mode only");
    if (opts.check_remainder_evolution) {
        std::mt19937_64 rng(0x9a);
        std::uniform_int_distribution<int> pick(0, state.size() - 1);
        for (int i = 0; i < opts.remainder_pairs; ++i) {
            int a = pick(rng), b = pick(rng);
            if (a == b) b = (b + 1 + i % (state.size() - 1)) % state.size();
            pairs.emplace_back(a, b);
        }
    }
    std::vector<Vec3> r_int(pairs.size(), Vec3::Zero());
    std::vector<Vec3> r_rate_prev(pairs.size(), Vec3::Zero());

    auto formula_rate = [&](const FilamentState& st, std::vector<Vec3>& out) {
        const ControlledVec c = st.controlled();
        const detail::VelocityFieldMap map(c, kernel);
        for (size_t p = 0; p < pairs.size(); ++p)
            out[p] = compose_remainder_formula(map, c, pairs[p].first, pairs[p].second,
                                              kernel.mu());
    };

    auto record = [&](const FilamentState& st, bool with_rate_update, double dt_since) {
        DiagnosticsSample s;
        s.t = st.t;
        const ControlledVec c = st.controlled();
        s.energy = energy_rough(c, kernel);
        s.sup_gamma = sup_norm(st.gamma);
        GridFn<Mat3> gp(st.gamma_prime.begin(), st.gamma_prime.end());
        s.sup_gamma_prime = sup_norm(gp);
        const double nu = st.base->nu();
        s.holder_gamma = holder_norm_1(st.gamma, nu, PairRange::half).value;
        s.holder_gamma_prime = holder_norm_1(gp, nu, PairRange::half).value;
        s.remainder_2nu = holder_norm_2(remainder_grid(c), 2 * nu, PairRange::near).value;
        if (!pairs.empty()) {
            std::vector<Vec3> rate(pairs.size());
            formula_rate(st, rate);
            if (with_rate_update)
                for (size_t p = 0; p < pairs.size(); ++p)
                    r_int[p] += 0.5 * dt_since * (r_rate_prev[p] + rate[p]);
            r_rate_prev = rate;
            double gap = 0;
            for (size_t p = 0; p < pairs.size(); ++p) {
                const Vec3 rdef = c.remainder(pairs[p].first, pairs[p].second);
                gap = std::max(gap, (rdef - r_int[p]).cwiseAbs().maxCoeff());
            }
            s.remainder_evolution_gap = gap;
        }
        if (!std::isfinite(s.energy) || !std::isfinite(s.holder_gamma))
            throw StepRejected("evolve: non-finite diagnostics at t=" + std::to_string(st.t));
        diag.samples.push_back(s);
        return s;
    };

    const DiagnosticsSample first = record(state, false, 0.0);
    diag.consts.h0 = first.energy;
    diag.consts.sup_gamma0 = first.sup_gamma;
    diag.consts.sup_gp0 = first.sup_gamma_prime;
    diag.consts.holder_gamma0 = first.holder_gamma;
    diag.consts.r0 = first.remainder_2nu;
    const double h0 = std::max(first.energy, 0.0);
    if (kernel.gamma_strength() > 0) {
        diag.consts.b0 =
            std::pow(2 * M_PI, -1.5) * std::sqrt(2.0 * kernel.spectral_moment(0) * h0);
        diag.consts.b1 =
            std::pow(2 * M_PI, -1.5) * std::sqrt(2.0 * kernel.spectral_moment(1) * h0);
        diag.consts.b2 =
            std::pow(2 * M_PI, -1.5) * std::sqrt(2.0 * kernel.spectral_moment(2) * h0);
    }

    const int every = std::max(1, opts.diagnostics_every);
    // initial remainder integral starts at R(0)
    for (int k = 1; k <= n_steps; ++k) {
        state = step(state, kernel, opts.dt, opts.scheme);
        GridFn<Mat3> gp(state.gamma_prime.begin(), state.gamma_prime.end());
        if (sup_norm(gp) > opts.blowup_factor * std::max(first.sup_gamma_prime, 1e-300))
            throw BlowUpSuspected("evolve: |gamma'| grew past the blow-up guard at t=" +
                                  std::to_string(state.t));
        if (k % every == 0 || k == n_steps)
            record(state, true, opts.dt * ((k % every == 0) ? every : k % every));
        if (opts.snapshot_every > 0 && opts.snapshot_sink &&
            (k % opts.snapshot_every == 0 || k == n_steps))
            opts.snapshot_sink(state);
    }
    return diag;
}

struct EnvelopeCheck {
    std::string name;
    bool pass = true;
    double worst_margin = 0;  // max over samples of lhs/rhs
};

struct GronwallReport {
    std::vector<EnvelopeCheck> checks;
    std::vector<std::array<bool, 4>> per_sample;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Check the a-priori envelopes with the spectral-moment constants, per
/// diagnostic sample:
///   e1:  sup|gamma(t)|   <= sup|gamma_0| + B0 t
///   e2:  sup|gamma'(t)|  <= sup|gamma_0'| exp(B1 t)
///   e3:  |gamma(t)|_nu   <= |gamma_0|_nu exp(B1 t)
///   e4:  |R(t)|_2nu      <= (|R_0|_2nu + B2/(2 B1) |gamma_0|_nu^2 exp(B1 t)) exp(B1 t)
/// constants_scale < 1 tightens the constants (sensitivity/fault injection).
inline GronwallReport gronwall_envelopes(const RunDiagnostics& diag,
                                         double constants_scale = 1.0) {
    const EnvelopeConstants& c = diag.consts;
    const double b0 = c.b0 * constants_scale;
    const double b1 = c.b1 * constants_scale;
    const double b2 = c.b2 * constants_scale;
    GronwallReport rep;
    rep.checks = {{"sup_gamma_linear"}, {"sup_gamma_prime_exp"}, {"holder_gamma_exp"},
                  {"remainder_envelope"}};
    auto update = [&](EnvelopeCheck& chk, double lhs, double rhs) {
        const double slack = rhs * (1.0 + 1e-9) + 1e-12;
        const bool ok = lhs <= slack;
        if (!ok) chk.pass = false;
        if (rhs > 0) chk.worst_margin = std::max(chk.worst_margin, lhs / rhs);
        return ok;
    };
    for (const auto& s : diag.samples) {
        const double dt = s.t;
        std::array<bool, 4> flags{};
        flags[0] = update(rep.checks[0], s.sup_gamma, c.sup_gamma0 + b0 * dt);
        flags[1] = update(rep.checks[1], s.sup_gamma_prime, c.sup_gp0 * std::exp(b1 * dt));
        flags[2] = update(rep.checks[2], s.holder_gamma, c.holder_gamma0 * std::exp(b1 * dt));
        const double coeff = b1 > 0 ? b2 / (2.0 * b1) : 0.0;
        flags[3] = update(rep.checks[3], s.remainder_2nu,
                          (c.r0 + coeff * c.holder_gamma0 * c.holder_gamma0 * std::exp(b1 * dt)) *
                              std::exp(b1 * dt));
        rep.per_sample.push_back(flags);
    }
    return rep;
}

}  // namespace rfil
