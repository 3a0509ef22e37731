#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "critwave/grid.hpp"
#include "critwave/modulation.hpp"
#include "critwave/solver.hpp"
#include "critwave/spectrum.hpp"

namespace critwave {

// Classification did not resolve within the time budget; maps to exit code 3.
struct UndeterminedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BumpSpec {
    double amplitude = 0.0;
    double center = 1.5;
    double width = 0.8;
};

// Compactly supported data pair (f1, f2), hard-zero beyond R with a C^inf
// cutoff on [0.8R, R]. `projected` means the tangent-plane condition
// <k0 f1 + f2, g0> = 0 holds (to round-off).
struct DataFamily {
    BumpSpec f1_shape, f2_shape;
    double support_radius = 5.0;
    bool projected = false;
    RadialField f1, f2;   // realized on the grid
    double family_norm = 0.0;  // H3xH2 surrogate: sqrt of summed squared L2/H1/H2 pieces
};

// C^inf cutoff: 1 on [0, 0.8], 0 from 1 on, exp-bridge between.
double smooth_cutoff(double x);

DataFamily make_family(const RadialGrid& grid, const BumpSpec& f1_shape,
                       const BumpSpec& f2_shape, double support_radius);

// f2 <- f2 - <k0 f1 + f2, g0> g0 chi_R / <g0 chi_R, g0>; keeps support in
// B(0,R), lands the pair on the tangent plane exactly.
DataFamily make_tangent_data(const DataFamily& family, const SpectralData& sd);

// Multiply both shapes by eps and re-project.
DataFamily scale_family(const RadialGrid& grid, const DataFamily& family, double eps,
                        const SpectralData& sd);

// (W + f1 + c g0 chi_R, f2); c is the swept coordinate h + delta0.
WaveState build_initial_state(const DataFamily& family, double c, const SpectralData& sd);

struct ThresholdResult {
    double h_star = 0.0;
    double bracket_width = 0.0;
    int runs = 0;
    Outcome upper_outcome, lower_outcome;
    double family_norm = 0.0;
    double c_lo = 0.0, c_hi = 0.0;
};

// Expand/shrink a candidate bracket until (Decay, Blowup) endpoints are
// certified. Throws after `max_expand` doublings.
std::pair<double, double> find_bracket(const DataFamily& family, const SpectralData& sd,
                                       const SolverConfig& cfg, double c_lo, double c_hi,
                                       int max_expand = 12);

// Bisection on the swept coordinate until bracket <= tol, endpoints
// re-certified. Undetermined at an endpoint or midpoint throws with the
// time reached (t_max budget too small for that proximity).
ThresholdResult find_threshold(const DataFamily& family, const SpectralData& sd,
                               std::pair<double, double> bracket, double tol,
                               const SolverConfig& cfg);

// Trajectory at the bisected point with modulation probes on; the
// on-manifold reference every ejection/bootstrap measurement compares to.
TrajectoryRecord run_reference(const DataFamily& family, const ThresholdResult& thr,
                               const SpectralData& sd, const SolverConfig& cfg,
                               double t_max, bool snapshots = false);

struct EjectionReport {
    double k_fit = 0.0;
    double alpha_inf = 1.0;        // late-window alpha of the reference run
    double window_t0 = 0.0, window_t1 = 0.0;
    double exit_time = 0.0;        // first |delta_rel| >= epsilon0
    bool sign_consistent = false;  // sign(delta_rel) == sign(c_offset) on window
    double n_ratio_max = 0.0;      // max |n_-/n_+| on the window
    double c_offset = 0.0;
    std::vector<double> times, delta_rel, delta_raw;
};

struct EjectionConfig {
    double epsilon0 = 0.1;        // ejection window ceiling
    double floor_guard = 5.0;     // window opens above guard * reference |delta| floor
    double min_window = 0.0;      // 0 -> default 3/k0
};

// Evolve at c = h_star + c_offset, track delta(t) relative to the reference
// trajectory (the unstable coordinate of eta = u_pert - u_ref), fit
// log|delta_rel| on the contiguous window below epsilon0. Throws
// "insufficient linear regime" if the window is shorter than 3/k0.
EjectionReport measure_ejection(const DataFamily& family, double c_offset,
                                const ThresholdResult& thr, const SpectralData& sd,
                                const SolverConfig& cfg, const TrajectoryRecord& reference,
                                const EjectionConfig& ecfg = {});

struct BootstrapReport {
    double rho_sup = 0.0;          // sup ||eta_tilde||_{H2 surr} / |delta_eta|
    double n_ratio_max = 0.0;      // max |n_-/n_+| of the eta coordinate
    double window_t0 = 0.0, window_t1 = 0.0;
    double gauge_mismatch_max = 0.0;  // max rel gap between g_alpha and g_alphainf pairings
    std::vector<double> times, rho, delta_eta;
};

// Paired-trajectory check: eta(t) = u_pert(t) - u_ref(t), split off the
// g_alpha component, report rho(t) = ||eta_tilde||_{H2 surrogate}/|delta|.
// Requires both runs recorded with snapshots on one grid.
BootstrapReport bootstrap_check(const DataFamily& family, double c_offset,
                                const ThresholdResult& thr, const SpectralData& sd,
                                const SolverConfig& cfg, const TrajectoryRecord& reference,
                                const EjectionConfig& ecfg = {});

struct HScalingPoint {
    double eps = 0.0;
    double h_star = 0.0;
    double h_rel = 0.0;  // h_star minus the (0,0)-family baseline
    double family_norm = 0.0;
    double bracket_width = 0.0;
};

struct HScalingReport {
    std::vector<HScalingPoint> points;
    double baseline_h = 0.0;  // (0,0)-family threshold (pure discretization offset)
    double slope = 0.0;       // log|h_rel| vs log eps least-squares slope
    double lipschitz = 0.0;   // |h(A)-h(B)| / ||A-B|| for the perturbed pair, when run
};

HScalingReport sweep_h_scaling(const RadialGrid& grid, const DataFamily& base,
                               const std::vector<double>& epsilons, const SpectralData& sd,
                               const SolverConfig& cfg, double bisect_tol,
                               std::optional<std::pair<DataFamily, DataFamily>> lipschitz_pair = {});

}  // namespace critwave
