// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rfil/cochain.hpp"
#include "rfil/errors.hpp"
#include "rfil/evolution.hpp"

namespace rfil {

/// Locale-independent shortest-faithful decimal formatting.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(std::string_view s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{}) throw ConfigError("bad number: '" + std::string(s) + "'");
    return v;
}

struct CurveSnapshot {
    GridFn<Vec3> samples;
    double nu = 0;
    long long seed = 0;
    double scale = 1.0;
};

/// Curve snapshot file: header with N, nu, seed, scale, then one record per
/// node with fields (index, xi, x, y, z).
inline void write_curve_snapshot(const std::filesystem::path& path, const GridFn<Vec3>& samples,
                                 double nu, long long seed, double scale) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    const int n = static_cast<int>(samples.size());
    out << "# rfil-curve 1\n";
    out << "# n=" << n << " nu=" << fmt_double(nu) << " seed=" << seed
        << " scale=" << fmt_double(scale) << "\n";
    for (int i = 0; i < n; ++i) {
        out << i << ' ' << fmt_double(static_cast<double>(i) / n) << ' '
            << fmt_double(samples[i][0]) << ' ' << fmt_double(samples[i][1]) << ' '
            << fmt_double(samples[i][2]) << '\n';
    }
}

inline CurveSnapshot read_curve_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("# rfil-curve", 0) != 0)
        throw ConfigError("not a curve snapshot: " + path.string());
    if (!std::getline(in, line)) throw ConfigError("missing snapshot header");
    CurveSnapshot snap;
    int n = 0;
    {
        std::istringstream hs(line);
        std::string tok;
        while (hs >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "n") n = static_cast<int>(parse_double(val));
            else if (key == "nu") snap.nu = parse_double(val);
            else if (key == "seed") snap.seed = static_cast<long long>(parse_double(val));
            else if (key == "scale") snap.scale = parse_double(val);
        }
    }
    if (n < 8) throw ConfigError("snapshot header: bad n");
    snap.samples.resize(n);
    for (int i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw ConfigError("snapshot truncated at node " +
                                                       std::to_string(i));
        std::istringstream ls(line);
        std::string f0, f1, fx, fy, fz;
        if (!(ls >> f0 >> f1 >> fx >> fy >> fz))
            throw ConfigError("snapshot: bad record at node " + std::to_string(i));
        snap.samples[i] = Vec3(parse_double(fx), parse_double(fy), parse_double(fz));
    }
    return snap;
}

/// Line-delimited run log: one record per diagnostic sample.
inline void write_run_log(const std::filesystem::path& path, const RunDiagnostics& diag,
                          const GronwallReport& env) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "# t H sup_gamma sup_gamma_prime holder_gamma holder_gamma_prime r_2nu "
           "e1 e2 e3 e4\n";
    for (size_t i = 0; i < diag.samples.size(); ++i) {
        const auto& s = diag.samples[i];
        out << fmt_double(s.t) << ' ' << fmt_double(s.energy) << ' ' << fmt_double(s.sup_gamma)
            << ' ' << fmt_double(s.sup_gamma_prime) << ' ' << fmt_double(s.holder_gamma) << ' '
            << fmt_double(s.holder_gamma_prime) << ' ' << fmt_double(s.remainder_2nu);
        const auto& f = env.per_sample[i];
        for (int e = 0; e < 4; ++e) out << ' ' << (f[e] ? 1 : 0);
        out << '\n';
    }
}

}  // namespace rfil
