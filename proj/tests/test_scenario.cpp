#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <sstream>

#include "birot/scenario.hpp"
#include "doctest.h"

using namespace birot;

namespace {

ScenarioConfig tiny_config(const std::string& out) {
    ScenarioConfig cfg;
    cfg.grid = {2.0, 2.0, 24, 24, Stagger::cell_centered};
    cfg.center = {0.8, 0.8};
    cfg.width = 0.15;
    cfg.amplitude = 1.0;
    cfg.dt = 0.02;
    cfg.t_end = 0.08;
    cfg.quad = {QuadRule::gauss_legendre, 12, 12, true, 1.0, 20};
    cfg.seed_threshold = 1e-3;
    cfg.emit_every = 2;
    cfg.output_dir = out;
    return cfg;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config round trip is the identity") {
    ScenarioConfig cfg = tiny_config("x");
    cfg.probes = {{0.5, 1.0}, {1.5, 0.25}};
    const std::string text = serialize_config(cfg);
    const ScenarioConfig back = parse_config(text);
    CHECK(serialize_config(back) == text);
}

TEST_CASE("config parsing errors") {
    CHECK_THROWS_AS(parse_config("run.dt = -1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("initial.kind = bogus\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("initial.kind = from_file\n"), std::invalid_argument);
}

TEST_CASE("zero-amplitude scenario completes with all-zero diagnostics") {
    ScenarioConfig cfg = tiny_config(
        (std::filesystem::temp_directory_path() / "birot_zero_run").string());
    cfg.amplitude = 0.0;
    const RunResult res = run(cfg);
    CHECK(res.exit_code == exit_ok);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].w_sup == 0.0);
    CHECK(res.rows[0].zeta_l1 == 0.0);
    std::filesystem::remove_all(cfg.output_dir);
}

TEST_CASE("tiny run completes, conserves, and emits artifacts") {
    ScenarioConfig cfg = tiny_config(
        (std::filesystem::temp_directory_path() / "birot_tiny_run").string());
    const RunResult res = run(cfg);
    REQUIRE(res.exit_code == exit_ok);
    CHECK(res.final_time == doctest::Approx(0.08).epsilon(1e-12));
    REQUIRE(res.rows.size() == 3);  // t = 0, 0.04, 0.08
    CHECK(res.rows.back().zeta_sup == res.rows.front().zeta_sup);
    CHECK(res.rows.back().zeta_l1 == res.rows.front().zeta_l1);
    CHECK(res.rows.back().length_L >= 1.0);
    CHECK(std::filesystem::exists(std::filesystem::path(cfg.output_dir) /
                                  "diagnostics.csv"));
    CHECK(std::filesystem::exists(std::filesystem::path(cfg.output_dir) /
                                  "checkpoint_final.txt"));
    CHECK(std::filesystem::exists(std::filesystem::path(cfg.output_dir) / "w_final.txt"));
    std::filesystem::remove_all(cfg.output_dir);
}

TEST_CASE("gronwall monitor over a real run flags nothing") {
    ScenarioConfig cfg = tiny_config(
        (std::filesystem::temp_directory_path() / "birot_gronwall_run").string());
    cfg.t_end = 0.12;
    cfg.emit_every = 1;
    const RunResult res = run(cfg);
    REQUIRE(res.exit_code == exit_ok);
    REQUIRE(res.rows.size() >= 3);
    const GronwallReport rep = gronwall_monitor(res.rows);
    CHECK(std::isfinite(rep.median_c_w));
    CHECK(std::isfinite(rep.median_c_wr));
    CHECK(rep.flagged_steps == 0);
    std::filesystem::remove_all(cfg.output_dir);
}

TEST_CASE("identical configs give bit-identical diagnostics") {
    const auto base = std::filesystem::temp_directory_path();
    ScenarioConfig a = tiny_config((base / "birot_det_a").string());
    ScenarioConfig b = tiny_config((base / "birot_det_b").string());
    REQUIRE(run(a).exit_code == exit_ok);
    REQUIRE(run(b).exit_code == exit_ok);
    CHECK(slurp(std::filesystem::path(a.output_dir) / "diagnostics.csv") ==
          slurp(std::filesystem::path(b.output_dir) / "diagnostics.csv"));
    std::filesystem::remove_all(a.output_dir);
    std::filesystem::remove_all(b.output_dir);
}

TEST_CASE("from_file scenarios load the snapshot") {
    const auto base = std::filesystem::temp_directory_path();
    ScenarioConfig gen = tiny_config((base / "birot_ff_gen").string());
    const ScalarField zeta = build_initial_zeta(gen);
    const auto snap = base / "birot_ff_zeta.txt";
    write_snapshot(snap, zeta);

    ScenarioConfig cfg = tiny_config((base / "birot_ff_run").string());
    cfg.kind = InitialKind::from_file;
    cfg.initial_path = snap.string();
    const RunResult res = run(cfg);
    CHECK(res.exit_code == exit_ok);
    std::filesystem::remove(snap);
    std::filesystem::remove_all(cfg.output_dir);
}

TEST_CASE("failure exit codes and error records") {
    const auto base = std::filesystem::temp_directory_path();

    SUBCASE("truncation failure") {
        ScenarioConfig cfg = tiny_config((base / "birot_trunc").string());
        cfg.center = {1.9, 1.9};  // mass on the outer rings
        const RunResult res = run(cfg);
        CHECK(res.exit_code == exit_truncation_failure);
        CHECK(std::filesystem::exists(std::filesystem::path(cfg.output_dir) /
                                      "error.json"));
        std::filesystem::remove_all(cfg.output_dir);
    }
    SUBCASE("CFL violation") {
        ScenarioConfig cfg = tiny_config((base / "birot_cfl").string());
        cfg.dt = 40.0;
        cfg.t_end = 40.0;
        const RunResult res = run(cfg);
        CHECK(res.exit_code == exit_cfl_violation);
        std::filesystem::remove_all(cfg.output_dir);
    }
}

TEST_CASE("antisymmetric pair generator is exactly antisymmetric on square grids") {
    ScenarioConfig cfg = tiny_config("x");
    cfg.kind = InitialKind::diagonal_antisymmetric_pair;
    cfg.center = {1.2, 0.6};
    const ScalarField zeta = build_initial_zeta(cfg);
    const GridSpec& g = zeta.grid();
    for (int j = 0; j < g.n_s; ++j)
        for (int i = 0; i < g.n_r; ++i)
            CHECK(zeta.at(i, j) == -zeta.at(j, i));
}
