#include "critwave.h"

#include <cstring>
#include <string>

#include "critwave/config.hpp"
#include "critwave/experiments.hpp"
#include "critwave/grid.hpp"
#include "critwave/ground_state.hpp"
#include "critwave/outputs.hpp"
#include "critwave/spectrum.hpp"
#include "critwave/version.hpp"

namespace {

thread_local std::string g_last_error;

cw_status set_error(cw_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

template <typename F>
cw_status guarded(F&& f) {
    try {
        return f();
    } catch (const critwave::ConfigError& e) {
        return set_error(CW_ERR_CONFIG, e.what());
    } catch (const critwave::UndeterminedError& e) {
        return set_error(CW_ERR_UNDETERMINED, e.what());
    } catch (const std::invalid_argument& e) {
        return set_error(CW_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return set_error(CW_ERR_NUMERICAL, e.what());
    }
}

}  // namespace

struct cw_grid {
    critwave::RadialGrid grid;
};

struct cw_spectrum {
    critwave::SpectralData data;
};

extern "C" {

const char* cw_version(void) { return CRITWAVE_VERSION_STRING; }

const char* cw_status_name(cw_status s) {
    switch (s) {
        case CW_OK: return "ok";
        case CW_ERR_INVALID_ARGUMENT: return "invalid argument";
        case CW_ERR_CONFIG: return "config error";
        case CW_ERR_UNDETERMINED: return "classification undetermined";
        case CW_ERR_NUMERICAL: return "numerical error";
        case CW_ERR_IO: return "io error";
    }
    return "unknown";
}

size_t cw_last_error(char* buf, size_t len) {
    if (buf && len > 0) {
        const size_t n = g_last_error.size() < len - 1 ? g_last_error.size() : len - 1;
        std::memcpy(buf, g_last_error.data(), n);
        buf[n] = '\0';
    }
    return g_last_error.size();
}

cw_status cw_grid_create(int n_points, double dr, cw_grid** out) {
    if (!out) return set_error(CW_ERR_INVALID_ARGUMENT, "cw_grid_create: out is null");
    *out = nullptr;
    return guarded([&] {
        *out = new cw_grid{critwave::RadialGrid(n_points, dr)};
        return CW_OK;
    });
}

void cw_grid_free(cw_grid* g) { delete g; }

int cw_grid_n_points(const cw_grid* g) { return g ? g->grid.n_points : 0; }

double cw_grid_dr(const cw_grid* g) { return g ? g->grid.dr : 0.0; }

cw_status cw_ground_state(const cw_grid* g, double lambda, double* values) {
    if (!g || !values) return set_error(CW_ERR_INVALID_ARGUMENT, "cw_ground_state: null argument");
    return guarded([&] {
        const critwave::RadialField W =
            critwave::eval_W(critwave::SolitonParams{lambda}, g->grid);
        std::memcpy(values, W.values.data(), W.values.size() * sizeof(double));
        return CW_OK;
    });
}

cw_status cw_spectrum_compute(const cw_grid* g, cw_spectrum** out) {
    if (!g || !out) return set_error(CW_ERR_INVALID_ARGUMENT, "cw_spectrum_compute: null argument");
    *out = nullptr;
    return guarded([&] {
        *out = new cw_spectrum{
            critwave::compute_ground_spectrum(g->grid, critwave::EigenMethod::matrix)};
        return CW_OK;
    });
}

void cw_spectrum_free(cw_spectrum* s) { delete s; }

double cw_spectrum_k0(const cw_spectrum* s) { return s ? s->data.k0 : 0.0; }
double cw_spectrum_k0_shooting(const cw_spectrum* s) { return s ? s->data.k0_shooting : 0.0; }
double cw_spectrum_k0_matrix(const cw_spectrum* s) { return s ? s->data.k0_matrix : 0.0; }
double cw_spectrum_residual_eig(const cw_spectrum* s) { return s ? s->data.residual_eig : 0.0; }
double cw_spectrum_residual_res(const cw_spectrum* s) { return s ? s->data.residual_res : 0.0; }
int cw_spectrum_negative_count(const cw_spectrum* s) { return s ? s->data.negative_count : -1; }

cw_status cw_spectrum_mode(const cw_spectrum* s, double* values) {
    if (!s || !values) return set_error(CW_ERR_INVALID_ARGUMENT, "cw_spectrum_mode: null argument");
    std::memcpy(values, s->data.g0.values.data(), s->data.g0.values.size() * sizeof(double));
    return CW_OK;
}

cw_status cw_find_threshold(const char* config_text, cw_threshold_result* out) {
    if (!out) return set_error(CW_ERR_INVALID_ARGUMENT, "cw_find_threshold: out is null");
    return guarded([&] {
        const critwave::RunConfig cfg = critwave::parse_config(config_text ? config_text : "");
        const critwave::RadialGrid grid(cfg.grid_n_points, cfg.grid_dr);
        const critwave::SpectralData sd =
            critwave::compute_ground_spectrum(grid, critwave::EigenMethod::matrix);
        const critwave::BumpSpec f1{cfg.family_f1_amplitude, cfg.family_f1_center,
                                    cfg.family_f1_width};
        const critwave::BumpSpec f2{cfg.family_f2_amplitude, cfg.family_f2_center,
                                    cfg.family_f2_width};
        const critwave::DataFamily fam = critwave::make_tangent_data(
            critwave::make_family(grid, f1, f2, cfg.family_support_radius), sd);
        critwave::SolverConfig scfg;
        scfg.cfl = cfg.solver_cfl;
        scfg.t_max = cfg.solver_t_max;
        scfg.record_stride = cfg.solver_record_stride;
        std::pair<double, double> br{cfg.threshold_c_lo, cfg.threshold_c_hi};
        if (cfg.threshold_auto_bracket)
            br = critwave::find_bracket(fam, sd, scfg, br.first, br.second);
        const critwave::ThresholdResult thr =
            critwave::find_threshold(fam, sd, br, cfg.threshold_tol, scfg);
        out->h_star = thr.h_star;
        out->bracket_width = thr.bracket_width;
        out->runs = thr.runs;
        out->upper_is_blowup = thr.upper_outcome.is_blowup() ? 1 : 0;
        out->lower_is_decay = thr.lower_outcome.is_decay() ? 1 : 0;
        out->family_norm = thr.family_norm;
        return CW_OK;
    });
}

cw_status cw_run(const char* subcommand, const char* config_text, const char* out_dir) {
    if (!subcommand || !out_dir)
        return set_error(CW_ERR_INVALID_ARGUMENT, "cw_run: null subcommand or out_dir");
    return guarded([&] {
        const critwave::RunConfig cfg = critwave::parse_config(config_text ? config_text : "");
        std::string err;
        const int code = critwave::run_subcommand(subcommand, cfg, out_dir, &err);
        if (code != critwave::exit_ok) return set_error(static_cast<cw_status>(code), err);
        return CW_OK;
    });
}

}  // extern "C"
