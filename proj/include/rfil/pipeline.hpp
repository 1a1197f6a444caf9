// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <json.hpp>
#include <thread>

#include "rfil/validate.hpp"

namespace rfil {

using Json = nlohmann::ordered_json;

struct PipelineOutcome {
    int exit_code = 0;
    Json summary;
};

namespace detail {

inline Json scenario_json(const Scenario& sc) {
    Json j;
    j["curve"] = {{"kind", sc.curve.kind}, {"n", sc.curve.n},     {"nu", sc.curve.nu},
                  {"seed", sc.curve.seed}, {"scale", sc.curve.scale}};
    if (!sc.curve.file.empty()) j["curve"]["file"] = sc.curve.file;
    j["kernel"] = {{"gamma", sc.kernel.gamma}, {"mu", sc.kernel.mu}};
    j["run"] = {{"horizon", sc.run.horizon},
                {"dt", sc.run.dt},
                {"scheme", sc.run.scheme},
                {"diagnostics_every", sc.run.diagnostics_every}};
    return j;
}

inline Json check_json(const std::string& name, bool pass, double value, double threshold) {
    Json j;
    j["name"] = name;
    j["pass"] = pass;
    j["value"] = value;
    j["threshold"] = threshold;
    return j;
}

inline void write_summary(const Scenario& sc, const Json& summary) {
    namespace fs = std::filesystem;
    fs::create_directories(sc.out_dir);
    std::ofstream out(fs::path(sc.out_dir) / "summary.json");
    out << summary.dump(2) << "\n";
}

inline double default_drift_tolerance(const Scenario& sc) {
    const bool smooth = sc.curve.nu > 0.5;
    if (sc.run.scheme == "rk4") return smooth ? 1e-6 : 1e-3;
    return 5e-2;
}

}  // namespace detail

/// energy pipeline: three-route energy computation with agreement and
/// positivity checks.
inline PipelineOutcome pipeline_energy(const Scenario& sc) {
    validate_scenario(sc);
    const KernelSpec kernel = build_kernel(sc.kernel);
    const auto samples = build_curve(sc.curve);
    const auto c = self_controlled(lift_piecewise_linear(samples, sc.curve.nu));
    const EnergyReport rep = energy_report(c, kernel);

    PipelineOutcome out;
    out.summary["pipeline"] = "energy";
    out.summary["scenario"] = detail::scenario_json(sc);
    Json res;
    res["h_rough"] = rep.h_rough;
    if (rep.has_double) res["h_double"] = rep.h_double;
    res["h_fourier"] = rep.h_fourier;
    res["agreement"] = rep.agreement;
    out.summary["results"] = res;

    Json checks = Json::array();
    if (sc.check_enabled("energy_agreement"))
        checks.push_back(detail::check_json("energy_agreement", rep.agreement <= 1e-3,
                                            rep.agreement, 1e-3));
    if (sc.check_enabled("energy_positivity")) {
        const double floor =
            -1e-9 * sc.kernel.gamma * sc.kernel.gamma / sc.kernel.mu;
        checks.push_back(detail::check_json("energy_positivity", rep.h_rough >= floor,
                                            rep.h_rough, floor));
    }
    out.summary["checks"] = checks;
    for (const auto& chk : checks)
        if (!chk["pass"].get<bool>()) out.exit_code = 3;
    out.summary["exit_code"] = out.exit_code;
    detail::write_summary(sc, out.summary);
    return out;
}

/// evolve pipeline: time integration with conservation and envelope checks,
/// run log and optional snapshots.
inline PipelineOutcome pipeline_evolve(const Scenario& sc) {
    validate_scenario(sc);
    namespace fs = std::filesystem;
    fs::create_directories(sc.out_dir);
    const KernelSpec kernel = build_kernel(sc.kernel);
    const auto samples = build_curve(sc.curve);
    FilamentState st = make_state(samples, sc.curve.nu);

    EvolveOptions opts;
    opts.horizon = sc.run.horizon;
    opts.dt = sc.run.dt;
    opts.scheme = sc.run.scheme == "euler" ? Scheme::euler : Scheme::rk4;
    opts.diagnostics_every = sc.run.diagnostics_every;
    opts.snapshot_every = sc.run.snapshot_every;
    int snap_index = 0;
    if (opts.snapshot_every > 0)
        opts.snapshot_sink = [&](const FilamentState& s) {
            char name[64];
            std::snprintf(name, sizeof(name), "snapshot_%04d.curve", snap_index++);
            write_curve_snapshot(fs::path(sc.out_dir) / name, s.gamma, s.base->nu(),
                                 sc.curve.seed, sc.curve.scale);
        };

    PipelineOutcome out;
    out.summary["pipeline"] = "evolve";
    out.summary["scenario"] = detail::scenario_json(sc);
    try {
        const RunDiagnostics diag = evolve(st, kernel, opts);
        const GronwallReport env = gronwall_envelopes(diag);
        write_run_log(fs::path(sc.out_dir) / "run.log", diag, env);

        const double drift = diag.energy_drift();
        const double tol = detail::default_drift_tolerance(sc);
        Json res;
        res["energy_initial"] = diag.samples.front().energy;
        res["energy_final"] = diag.samples.back().energy;
        res["energy_drift"] = drift;
        res["samples"] = diag.samples.size();
        Json envj = Json::array();
        for (const auto& chk : env.checks)
            envj.push_back(detail::check_json(chk.name, chk.pass, chk.worst_margin, 1.0));
        res["envelopes"] = envj;
        out.summary["results"] = res;

        Json checks = Json::array();
        if (sc.check_enabled("conservation"))
            checks.push_back(detail::check_json("energy_conservation", drift <= tol, drift, tol));
        if (sc.check_enabled("gronwall"))
            checks.push_back(detail::check_json("gronwall_envelopes", env.all_pass(),
                                                env.all_pass() ? 0.0 : 1.0, 0.5));
        out.summary["checks"] = checks;
        for (const auto& chk : checks)
            if (!chk["pass"].get<bool>()) out.exit_code = 3;
    } catch (const BlowUpSuspected& e) {
        out.summary["error"] = std::string("BlowUpSuspected: ") + e.what();
        out.exit_code = 3;
    } catch (const StepRejected& e) {
        out.summary["error"] = std::string("StepRejected: ") + e.what();
        out.exit_code = 3;
    }
    out.summary["exit_code"] = out.exit_code;
    detail::write_summary(sc, out.summary);
    return out;
}

/// validate pipeline: the invariant battery, printed as a table.
inline PipelineOutcome pipeline_validate(const Scenario& sc, std::ostream& table,
                                         const FaultInjection& fault = {}) {
    const auto results = validate_suite(fault);
    PipelineOutcome out;
    out.summary["pipeline"] = "validate";
    Json checks = Json::array();
    table << "check                     status   value         threshold     seconds\n";
    for (const auto& r : results) {
        checks.push_back(detail::check_json(r.name, r.pass, r.value, r.threshold));
        char line[160];
        std::snprintf(line, sizeof(line), "%-25s %-8s %-13.4g %-13.4g %.2f\n", r.name.c_str(),
                      r.pass ? "PASS" : "FAIL", r.value, r.threshold, r.seconds);
        table << line;
        if (!r.pass) out.exit_code = 3;
    }
    out.summary["checks"] = checks;
    out.summary["exit_code"] = out.exit_code;
    detail::write_summary(sc, out.summary);
    return out;
}

/// sweep: fan the energy or evolve pipeline across seeds, one output
/// directory per run.
inline int pipeline_sweep(const Scenario& base, const std::vector<long long>& seeds,
                          const std::string& pipeline, int threads) {
    validate_scenario(base);
    std::vector<int> codes(seeds.size(), 0);
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= seeds.size()) return;
            Scenario sc = base;
            sc.curve.seed = seeds[i];
            sc.out_dir = (std::filesystem::path(base.out_dir) /
                          ("seed_" + std::to_string(seeds[i])))
                             .string();
            try {
                codes[i] = pipeline == "energy" ? pipeline_energy(sc).exit_code
                                                : pipeline_evolve(sc).exit_code;
            } catch (const Error&) {
                codes[i] = 3;
            }
        }
    };
    std::vector<std::thread> pool;
    const int nt = std::max(1, threads);
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    int worst = 0;
    for (int c : codes) worst = std::max(worst, c);
    return worst;
}

}  // namespace rfil
