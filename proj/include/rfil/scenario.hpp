// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>

#include "rfil/brownian.hpp"
#include "rfil/curves.hpp"
#include "rfil/io.hpp"
#include "rfil/kernel.hpp"

namespace rfil {

struct CurveSpec {
    std::string kind = "circle";  // circle | trefoil | brownian_bridge | file
    int n = 256;
    double nu = 0.9;
    long long seed = 0;
    double scale = 1.0;
    std::string file;
};

struct KernelCfg {
    double gamma = 1.0;
    double mu = 1.0;
    int table_segments = 12;
};

struct RunCfg {
    double horizon = 0.5;
    double dt = 1e-3;
    std::string scheme = "rk4";
    int diagnostics_every = 10;
    int snapshot_every = 0;
};

struct Scenario {
    CurveSpec curve;
    KernelCfg kernel;
    RunCfg run;
    std::map<std::string, bool> checks;  // empty: all default checks on
    std::string out_dir = "out";

    bool check_enabled(const std::string& name) const {
        auto it = checks.find(name);
        return it == checks.end() ? true : it->second;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline bool parse_on_off(const std::string& v, const std::string& key) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ConfigError("config: bad boolean for '" + key + "': " + v);
}

}  // namespace detail

/// Flat sectioned key=value configuration:
///
///   [curve]
///   kind = circle        # circle | trefoil | brownian_bridge | file
///   n = 256
///   nu = 0.9
///   ...
///
/// Sections: curve, kernel, run, checks, output.  '#' starts a comment.
inline Scenario parse_scenario(std::istream& in) {
    Scenario sc;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": bad section");
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (section == "curve") {
            if (key == "kind") sc.curve.kind = val;
            else if (key == "n") sc.curve.n = static_cast<int>(parse_double(val));
            else if (key == "nu") sc.curve.nu = parse_double(val);
            else if (key == "seed") sc.curve.seed = static_cast<long long>(parse_double(val));
            else if (key == "scale") sc.curve.scale = parse_double(val);
            else if (key == "file") sc.curve.file = val;
            else throw ConfigError("config: unknown curve key '" + key + "'");
        } else if (section == "kernel") {
            if (key == "gamma") sc.kernel.gamma = parse_double(val);
            else if (key == "mu") sc.kernel.mu = parse_double(val);
            else if (key == "table_segments")
                sc.kernel.table_segments = static_cast<int>(parse_double(val));
            else throw ConfigError("config: unknown kernel key '" + key + "'");
        } else if (section == "run") {
            if (key == "horizon" || key == "T") sc.run.horizon = parse_double(val);
            else if (key == "dt") sc.run.dt = parse_double(val);
            else if (key == "scheme") sc.run.scheme = val;
            else if (key == "diagnostics_every")
                sc.run.diagnostics_every = static_cast<int>(parse_double(val));
            else if (key == "snapshot_every")
                sc.run.snapshot_every = static_cast<int>(parse_double(val));
            else throw ConfigError("config: unknown run key '" + key + "'");
        } else if (section == "checks") {
            sc.checks[key] = detail::parse_on_off(val, key);
        } else if (section == "output") {
            if (key == "dir") sc.out_dir = val;
            else throw ConfigError("config: unknown output key '" + key + "'");
        } else {
            throw ConfigError("config: unknown section '" + section + "'");
        }
    }
    return sc;
}

inline Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    return parse_scenario(in);
}

inline void validate_scenario(const Scenario& sc) {
    const auto& c = sc.curve;
    if (c.kind != "circle" && c.kind != "trefoil" && c.kind != "brownian_bridge" &&
        c.kind != "file")
        throw ConfigError("curve kind '" + c.kind + "' is not one of circle, trefoil, "
                          "brownian_bridge, file");
    if (c.kind != "file") {
        if (!is_power_of_two(c.n) || c.n < 8 || c.n > 1024)
            throw ConfigError("curve n = " + std::to_string(c.n) +
                              " must be a power of two in [8, 1024]");
    }
    if (!(c.nu > 1.0 / 3.0 && c.nu < 1.0))
        throw ConfigError("nu = " + fmt_double(c.nu) +
                          " violates the admissible range nu in (1/3, 1)");
    if (sc.kernel.mu <= 0) throw ConfigError("kernel mu must be positive");
    if (sc.kernel.gamma < 0) throw ConfigError("kernel gamma must be nonnegative");
    if (sc.run.dt <= 0) throw ConfigError("run dt must be positive");
    if (sc.run.horizon <= 0) throw ConfigError("run horizon must be positive");
    if (sc.run.scheme != "euler" && sc.run.scheme != "rk4")
        throw ConfigError("run scheme must be euler or rk4");
    if (sc.run.diagnostics_every < 1) throw ConfigError("diagnostics_every must be >= 1");
}

inline GridFn<Vec3> build_curve(const CurveSpec& c) {
    if (c.kind == "circle") return circle_curve(c.n, c.scale);
    if (c.kind == "trefoil") return trefoil_curve(c.n, c.scale);
    if (c.kind == "brownian_bridge")
        return sample_brownian_bridge(c.n, static_cast<std::uint64_t>(c.seed), Vec3::Zero(),
                                      c.scale);
    if (c.kind == "file") return read_curve_snapshot(c.file).samples;
    throw ConfigError("unknown curve kind " + c.kind);
}

inline KernelSpec build_kernel(const KernelCfg& k) {
    return KernelSpec(k.gamma, k.mu, 4, k.table_segments);
}

}  // namespace rfil
