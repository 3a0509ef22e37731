#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "critwave/config.hpp"

using namespace critwave;

TEST_CASE("empty text yields all defaults") {
    const RunConfig cfg = parse_config("");
    CHECK(cfg.grid_n_points == 3501);
    CHECK(cfg.grid_dr == 0.02);
    CHECK(cfg.solver_cfl == 0.5);
    CHECK(cfg.threshold_tol == 1e-8);
    CHECK(cfg.ejection_c_offsets.size() == 3);
    CHECK(cfg.output_dir == "out");
}

TEST_CASE("range violations carry the line number") {
    try {
        parse_config("# comment\n[solver]\ncfl = 1.5\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line 3") != std::string::npos);
        CHECK(msg.find("(0,1]") != std::string::npos);
    }
}

TEST_CASE("unknown keys are hard errors") {
    CHECK_THROWS_AS(parse_config("grid.banana = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid]\nn_pts = 100\n"), ConfigError);
    try {
        parse_config("\n\nnot_a_key = 1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("merge semantics: override only the named key") {
    const RunConfig cfg = parse_config("[grid]\ndr = 0.01\n");
    CHECK(cfg.grid_dr == 0.01);
    CHECK(cfg.grid_n_points == 3501);  // untouched default
}

TEST_CASE("type errors and malformed lines") {
    CHECK_THROWS_AS(parse_config("grid.n_points = soon\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("grid.dr 0.01\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid\ndr = 0.01\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("solver.store_snapshots = maybe\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("ejection.c_offsets = 1e-3,,1e-5\n"), ConfigError);
}

TEST_CASE("dotted keys work outside sections; sections qualify bare keys") {
    const RunConfig a = parse_config("solver.cfl = 0.25\n");
    CHECK(a.solver_cfl == 0.25);
    const RunConfig b = parse_config("[solver]\ncfl = 0.25\n");
    CHECK(b.solver_cfl == 0.25);
}

TEST_CASE("round trip: serialize then parse is semantically identical") {
    RunConfig cfg = parse_config(
        "[grid]\nn_points = 1751\ndr = 0.04\n[ejection]\nc_offsets = 1e-7,2e-6\n"
        "[output]\ndir = results/run1\n[solver]\nstore_snapshots = true\n");
    const std::string text = serialize_config(cfg);
    const RunConfig back = parse_config(text);
    CHECK(back.grid_n_points == cfg.grid_n_points);
    CHECK(back.grid_dr == cfg.grid_dr);
    CHECK(back.ejection_c_offsets == cfg.ejection_c_offsets);
    CHECK(back.output_dir == cfg.output_dir);
    CHECK(back.solver_store_snapshots == cfg.solver_store_snapshots);
    CHECK(serialize_config(back) == text);  // fixed point
}

TEST_CASE("cross-field validation") {
    CHECK_THROWS_AS(parse_config("threshold.c_lo = 0.1\nthreshold.c_hi = -0.1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[family]\nsupport_radius = 500\n"), ConfigError);
}
