#pragma once

#include <array>
#include <string>
#include <vector>

#include "critwave/grid.hpp"
#include "critwave/solver.hpp"
#include "critwave/spectrum.hpp"

namespace critwave {

// Radiation / modulation-parameter bounds measured on a near-threshold
// trajectory (u_* read off the frames as v = u - W_alpha).
struct DispersiveReport {
    double sup_decay_slope = 0.0;  // log sup|v| vs log t fit
    double fit_t0 = 0.0, fit_t1 = 0.0;
    std::array<double, 4> probe_radii{};
    // partial integrals I(x_j, T_k) over the record mesh, per probe
    std::vector<double> partial_times;
    std::vector<std::array<double, 4>> partial_integrals;
    std::array<double, 4> tail_ratio{};       // (I(T)-I(T/2))/I(T/2) at final T
    std::array<double, 4> tail_ratio_half{};  // same at T/2 (decrease check)
    double alpha_inf = 1.0;
    double alpha_decay_slope = 0.0;           // log|alpha - alpha_inf| vs log t
    double alpha_avg_sup = 0.0;               // sup_t |int_0^t (alpha_inf - alpha)|
    double alpha_avg_bound = 0.0;             // 5 * sup_t t |alpha_inf - alpha(t)|
    std::vector<double> a_times, a_series, a_avg_series;
    bool truncated = false;                   // frames expired before t_max
    double valid_until = 0.0;
};

// The bisected reference carries a residual unstable component that grows
// like (bracket/2) e^{k t}; once |delta(t)| climbs past 10x the series
// median (or past delta_floor, whichever is larger) the radiation read-off
// is contaminated and the series is censored there.
DispersiveReport measure_radiation(const TrajectoryRecord& traj, double delta_floor = 0.0);

enum class LinearDataMode { sin_mode, cos_mode };  // data (0,f) vs (f,0)

struct LinearDispersiveReport {
    double ratio = 0.0;              // max_probe L_t^1 / data norm (W11 sin, W21 cos)
    double data_norm = 0.0;
    std::array<double, 4> probe_radii{};
    std::array<double, 4> partial_integral{};
    std::array<double, 4> tail_ratio{};
    std::array<double, 4> tail_ratio_half{};
    double huygens_residual = 0.0;   // max |u(0,t)| past the support diameter (free cos)
    double plateau_variation = 0.0;  // rel spread of the plateau across sub-windows
    double plateau_cosine_vs_LamW = 0.0;  // shape correlation on r <= 10
    bool plateau_reliable = true;
    std::vector<double> plateau_field;
};

struct LinearCheckConfig {
    double t_max = 40.0;
    double cfl = 1.0;              // magic step; lowered automatically with potential
    std::array<double, 4> probe_radii = {0.0, 2.5, 5.0, 10.0};
    double support_radius = 5.0;
};

// Prop-3.1-style measurement: evolve (0,f) [sin] or (f,0) [cos], project
// snapshots off g0, subtract the empirical resonance plateau in sin mode
// (late-window time average standing in for c0 psi x psi), integrate |.|
// in t at the probes, divide by the discrete W^{1,1} / W^{2,1} norm of f.
LinearDispersiveReport linear_dispersive_check(const RadialField& f, LinearDataMode mode,
                                               PotentialMode potential,
                                               const SpectralData& sd,
                                               const LinearCheckConfig& cfg);

struct GammaSeries {
    std::vector<double> times;
    std::vector<double> gamma;  // Gamma(0, t)
    double sup_abs = 0.0;       // sup_{s,t} |Gamma(s,t)| over the mesh
    double alpha_inf = 1.0;
};

// Gamma(s,t) = int_s^t < g (v(s1) W_ainf^3 + (ainf - a(s1)) dV/dlambda|_ainf), g > ds1
// accumulated over the recorded mesh; needs snapshots in the trajectory.
GammaSeries phase_correction(const TrajectoryRecord& traj, const SpectralData& sd);

// Discrete W^{1,1} / W^{2,1} surrogates (radial measure).
double w11_norm(const RadialField& f);
double w21_norm(const RadialField& f);

// Least-squares slope of y against x (helper shared by the fit reports).
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);
double fit_slope_r2(const std::vector<double>& x, const std::vector<double>& y,
                    double* intercept, double* r2);

}  // namespace critwave
