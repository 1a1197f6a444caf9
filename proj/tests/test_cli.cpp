// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <fstream>
#include <sstream>

#include "rfil/pipeline.hpp"

using namespace rfil;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("scenario parsing and defaults") {
    std::istringstream cfg(R"(
[curve]
kind = circle   # smooth test geometry
n = 64
nu = 0.9
[kernel]
gamma = 1.0
mu = 0.5
[run]
horizon = 0.1
dt = 0.01
scheme = rk4
[checks]
conservation = on
gronwall = off
[output]
dir = /tmp/rfil_test_out
)");
    const Scenario sc = parse_scenario(cfg);
    CHECK(sc.curve.kind == "circle");
    CHECK(sc.curve.n == 64);
    CHECK(sc.kernel.mu == 0.5);
    CHECK(sc.run.scheme == "rk4");
    CHECK(sc.check_enabled("conservation"));
    CHECK_FALSE(sc.check_enabled("gronwall"));
    CHECK(sc.check_enabled("unlisted_defaults_on"));
    CHECK_NOTHROW(validate_scenario(sc));
}

TEST_CASE("config validation names the nu constraint") {
    Scenario sc;
    sc.curve.nu = 0.2;
    try {
        validate_scenario(sc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("(1/3, 1)") != std::string::npos);
    }
    sc.curve.nu = 0.9;
    sc.curve.n = 100;
    CHECK_THROWS_AS(validate_scenario(sc), ConfigError);
    sc.curve.n = 64;
    sc.run.dt = 0.0;
    CHECK_THROWS_AS(validate_scenario(sc), ConfigError);
    std::istringstream bad("[curve]\nkind circle\n");
    CHECK_THROWS_AS(parse_scenario(bad), ConfigError);
}

TEST_CASE("curve snapshot round-trip") {
    const auto dir = std::filesystem::temp_directory_path() / "rfil_snap";
    std::filesystem::create_directories(dir);
    const auto samples = sample_brownian_bridge(64, 5, Vec3(0.1, 0.2, 0.3), 0.7);
    write_curve_snapshot(dir / "c.curve", samples, 0.4, 5, 0.7);
    const auto snap = read_curve_snapshot(dir / "c.curve");
    REQUIRE(snap.samples.size() == samples.size());
    for (size_t i = 0; i < samples.size(); ++i)
        CHECK((snap.samples[i] - samples[i]).norm() == 0.0);  // %.17g is lossless
    CHECK(snap.nu == 0.4);
    CHECK(snap.seed == 5);
    CHECK(snap.scale == 0.7);

    // a scenario can load the snapshot back
    Scenario sc;
    sc.curve.kind = "file";
    sc.curve.file = (dir / "c.curve").string();
    sc.curve.nu = 0.4;
    const auto loaded = build_curve(sc.curve);
    CHECK(loaded.size() == samples.size());
}

TEST_CASE("energy pipeline writes a deterministic summary") {
    Scenario sc;
    sc.curve = {"circle", 128, 0.9, 0, 1.0, ""};
    sc.kernel = {1.0, 1.0, 12};
    sc.out_dir = (std::filesystem::temp_directory_path() / "rfil_energy").string();
    const auto out1 = pipeline_energy(sc);
    CHECK(out1.exit_code == 0);
    const std::string s1 = slurp(std::filesystem::path(sc.out_dir) / "summary.json");
    const auto out2 = pipeline_energy(sc);
    const std::string s2 = slurp(std::filesystem::path(sc.out_dir) / "summary.json");
    CHECK(s1 == s2);  // byte-identical summaries for identical config + seed
    CHECK(out1.summary["results"]["agreement"].get<double>() < 1e-3);
}

TEST_CASE("evolve pipeline produces run log and snapshots, exit 0") {
    Scenario sc;
    sc.curve = {"circle", 128, 0.9, 0, 1.0, ""};
    sc.kernel = {1.0, 1.0, 12};
    sc.run = {0.02, 2e-3, "rk4", 5, 5};
    sc.out_dir = (std::filesystem::temp_directory_path() / "rfil_evolve").string();
    std::filesystem::remove_all(sc.out_dir);
    const auto out = pipeline_evolve(sc);
    CHECK(out.exit_code == 0);
    CHECK(std::filesystem::exists(std::filesystem::path(sc.out_dir) / "run.log"));
    CHECK(std::filesystem::exists(std::filesystem::path(sc.out_dir) / "snapshot_0000.curve"));
    const std::string log = slurp(std::filesystem::path(sc.out_dir) / "run.log");
    CHECK(log.find("# t H") == 0);
    // zero-circulation run drifts by exactly zero
    Scenario frozen = sc;
    frozen.kernel.gamma = 0.0;
    frozen.out_dir += "_frozen";
    const auto fout = pipeline_evolve(frozen);
    CHECK(fout.exit_code == 0);
    CHECK(fout.summary["results"]["energy_drift"].get<double>() == 0.0);
}

TEST_CASE("validate pipeline battery passes and reacts to faults") {
    Scenario sc;
    sc.out_dir = (std::filesystem::temp_directory_path() / "rfil_validate").string();
    std::ostringstream table;
    const auto out = pipeline_validate(sc, table);
    CHECK(out.exit_code == 0);
    CHECK(table.str().find("FAIL") == std::string::npos);
    CHECK(table.str().find("chen_relation") != std::string::npos);

    FaultInjection fault;
    fault.perturb_area = true;
    std::ostringstream table2;
    const auto out2 = pipeline_validate(sc, table2, fault);
    CHECK(out2.exit_code == 3);
    CHECK(table2.str().find("FAIL") != std::string::npos);

    FaultInjection fault3;
    fault3.negate_phihat = true;
    std::ostringstream table3;
    CHECK(pipeline_validate(sc, table3, fault3).exit_code == 3);
}

TEST_CASE("sweep fans runs into per-seed directories") {
    Scenario sc;
    sc.curve = {"brownian_bridge", 32, 0.4, 0, 0.4, ""};
    sc.kernel = {1.0, 1.0, 12};
    sc.run = {0.01, 1e-3, "rk4", 5, 0};
    sc.out_dir = (std::filesystem::temp_directory_path() / "rfil_sweep").string();
    std::filesystem::remove_all(sc.out_dir);
    const int code = pipeline_sweep(sc, {0, 1, 2}, "evolve", 2);
    CHECK(code == 0);
    for (int s : {0, 1, 2})
        CHECK(std::filesystem::exists(std::filesystem::path(sc.out_dir) /
                                      ("seed_" + std::to_string(s)) / "summary.json"));
}
