#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace critwave {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fully resolved run configuration. Every field has a default; parse_config
// applies `key = value` lines (with [section] headers and # comments) on top
// and rejects unknown keys and malformed values with their line number.
struct RunConfig {
    // [grid] run grid
    int grid_n_points = 3501;
    double grid_dr = 0.02;

    // [spectrum] certification grid for the spectrum subcommand
    double spectrum_dr = 0.005;
    double spectrum_r_max = 40.0;

    // [solver]
    double solver_cfl = 0.5;
    double solver_t_max = 60.0;
    double solver_blowup_sup_threshold = 1e4;
    double solver_decay_local_energy_threshold = 1e-4;
    double solver_decay_sup_threshold = 1e-2;
    double solver_dwell_time = 5.0;
    double solver_causal_margin = 2.0;
    int solver_record_stride = 8;
    bool solver_store_snapshots = false;
    bool solver_drop_nonlinearity = false;

    // [family]
    double family_support_radius = 5.0;
    double family_norm_target = 0.0;  // > 0 rescales amplitudes to this surrogate norm
    double family_f1_amplitude = 0.0;
    double family_f1_center = 1.5;
    double family_f1_width = 0.8;
    double family_f2_amplitude = 0.0;
    double family_f2_center = 1.2;
    double family_f2_width = 0.7;

    // [evolve]
    double evolve_delta0 = 0.0;

    // [threshold]
    double threshold_c_lo = -0.05;
    double threshold_c_hi = 0.05;
    double threshold_tol = 1e-8;
    bool threshold_auto_bracket = true;

    // [ejection]
    std::vector<double> ejection_c_offsets = {1e-7, 1e-6, 1e-5};
    double ejection_epsilon0 = 0.1;
    double ejection_floor_guard = 5.0;
    double ejection_threshold_tol = 1e-12;

    // [bootstrap]
    double bootstrap_c_offset = 1e-6;
    double bootstrap_rho_tol = 0.2;
    double bootstrap_n_ratio_tol = 0.1;
    double bootstrap_threshold_tol = 1e-12;

    // [hscaling]
    std::vector<double> hscaling_epsilons = {0.05, 0.1, 0.2};
    double hscaling_tol = 1e-10;
    double hscaling_lipschitz_perturbation = 0.08;

    // [dispersive]
    double dispersive_threshold_tol = 1e-12;
    double dispersive_linear_t_max = 100.0;
    double dispersive_linear_r_max = 110.0;

    // [output]
    std::string output_dir = "out";
};

// Parse `key = value` text over defaults. Unknown keys, bad types, and
// violated ranges raise ConfigError with the offending line number.
RunConfig parse_config(const std::string& text);

// Canonical serialization; parse(serialize(cfg)) is semantically identical.
std::string serialize_config(const RunConfig& cfg);

}  // namespace critwave
