// Exercises the shared-library surface through critwave.h alone.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "critwave.h"

namespace {

int g_failures = 0;

#define REQUIRE(cond, msg)                                                       \
    do {                                                                         \
        if (!(cond)) {                                                           \
            std::fprintf(stderr, "[FAIL] %s:%d %s\n", __FILE__, __LINE__, msg);  \
            ++g_failures;                                                        \
        }                                                                        \
    } while (0)

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

int main() {
    REQUIRE(std::strcmp(cw_version(), "1.0.0") == 0, "version string");
    REQUIRE(std::strcmp(cw_status_name(CW_OK), "ok") == 0, "status names");

    // grid lifecycle + argument validation
    cw_grid* grid = nullptr;
    REQUIRE(cw_grid_create(8, 0.1, &grid) != CW_OK, "tiny grid rejected");
    {
        char buf[256];
        const size_t n = cw_last_error(buf, sizeof buf);
        REQUIRE(n > 0 && std::strstr(buf, "n_points") != nullptr, "error detail retrievable");
    }
    REQUIRE(cw_grid_create(2001, 0.02, &grid) == CW_OK, "grid create");
    REQUIRE(cw_grid_n_points(grid) == 2001, "grid size getter");
    REQUIRE(cw_grid_dr(grid) == 0.02, "grid spacing getter");

    // ground state samples
    std::vector<double> W(2001);
    REQUIRE(cw_ground_state(grid, 1.0, W.data()) == CW_OK, "ground state eval");
    REQUIRE(std::fabs(W[0] - 1.0) < 1e-14, "W(0) = 1");
    REQUIRE(cw_ground_state(grid, -2.0, W.data()) != CW_OK, "negative lambda rejected");
    REQUIRE(cw_ground_state(nullptr, 1.0, W.data()) == CW_ERR_INVALID_ARGUMENT, "null grid");

    // spectrum certificate on a coarse grid
    cw_spectrum* spec = nullptr;
    REQUIRE(cw_spectrum_compute(grid, &spec) == CW_OK, "spectrum compute");
    const double k0 = cw_spectrum_k0(spec);
    REQUIRE(std::fabs(k0 - 1.1) < 0.01, "k0 near 1.10");
    REQUIRE(cw_spectrum_negative_count(spec) == 1, "unique negative eigenvalue");
    REQUIRE(cw_spectrum_residual_eig(spec) <= 1e-6, "eigen residual");
    REQUIRE(std::fabs(cw_spectrum_k0_matrix(spec) - k0) == 0.0, "matrix value is certified k0");
    REQUIRE(std::fabs(cw_spectrum_k0_shooting(spec) - k0) / k0 < 1e-3, "methods close");
    std::vector<double> g0(2001);
    REQUIRE(cw_spectrum_mode(spec, g0.data()) == CW_OK, "mode copy");
    REQUIRE(g0[0] > 0.0, "mode positive at origin");

    // threshold through the config surface (coarse, fast settings)
    const char* thr_cfg =
        "[grid]\nn_points = 1751\ndr = 0.04\n"
        "[solver]\nt_max = 50\n"
        "[threshold]\nc_lo = -2e-3\nc_hi = 2e-3\ntol = 1e-6\n";
    cw_threshold_result thr;
    REQUIRE(cw_find_threshold(thr_cfg, &thr) == CW_OK, "threshold run");
    REQUIRE(thr.bracket_width <= 1e-6, "bracket tolerance met");
    REQUIRE(thr.lower_is_decay == 1, "lower endpoint decays");
    REQUIRE(thr.upper_is_blowup == 1, "upper endpoint blows up");
    REQUIRE(std::fabs(thr.h_star) <= 0.04 * 0.04, "threshold offset at grid scale");

    REQUIRE(cw_find_threshold("solver.cfl = 7\n", &thr) == CW_ERR_CONFIG, "config error code");

    // full subcommand through cw_run: spectrum twice, byte-identical outputs
    const char* spec_cfg = "[spectrum]\ndr = 0.02\nr_max = 30\n";
    REQUIRE(cw_run("spectrum", spec_cfg, "capi_out_a") == CW_OK, "cw_run spectrum A");
    REQUIRE(cw_run("spectrum", spec_cfg, "capi_out_b") == CW_OK, "cw_run spectrum B");
    for (const char* name : {"spectrum.csv", "g0.csv", "psi.csv", "manifest.txt"}) {
        const std::string a = slurp(std::string("capi_out_a/") + name);
        const std::string b = slurp(std::string("capi_out_b/") + name);
        REQUIRE(!a.empty(), "output file present");
        REQUIRE(a == b, "byte-identical rerun");
    }
    REQUIRE(cw_run("no_such_subcommand", "", "capi_out_c") == CW_ERR_CONFIG, "unknown subcommand");
    REQUIRE(cw_run(nullptr, "", "x") == CW_ERR_INVALID_ARGUMENT, "null subcommand");

    cw_spectrum_free(spec);
    cw_grid_free(grid);
    cw_grid_free(nullptr);  // must be a no-op

    if (g_failures == 0) std::printf("test_capi: all checks passed\n");
    return g_failures == 0 ? 0 : 1;
}
