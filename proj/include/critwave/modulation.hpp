#pragma once

#include <memory>
#include <vector>

#include "critwave/grid.hpp"
#include "critwave/spectrum.hpp"

namespace critwave {

namespace detail {
class CubicSpline;
}

// Decomposition u = W_alpha + v gauged by <v, Lambda* g_alpha> = 0.
struct ModulationFrame {
    double alpha = 1.0;
    RadialField v;
    double delta = 0.0;           // <v, g_alpha>
    double ortho_residual = 0.0;  // <v, Lambda* g_alpha> at the solved alpha
    double nondegeneracy = 0.0;   // |<d_lambda W_lambda|_alpha, Lambda* g_alpha>|
    bool valid = false;
};

// Owns a cubic interpolant of g0 so rescaled modes and frames can be
// evaluated repeatedly without re-solving the eigenproblem.
class Modulator {
  public:
    explicit Modulator(const SpectralData& sd);

    const SpectralData& spectrum() const { return *sd_; }

    // alpha^{3/2} g0(alpha r), L2-renormalized on the grid.
    RadialField mode_at(double alpha) const;
    // Lambda* g_alpha
    RadialField adjoint_mode_at(double alpha) const;

    // Safeguarded Newton on F(alpha) = <u - W_alpha, Lambda* g_alpha> with
    // bisection fallback inside [guess/1.5, 1.5*guess]. frame.valid = false
    // (not an exception) when no root exists there: the state is outside
    // the modulation regime.
    ModulationFrame decompose(const RadialField& u, double alpha_guess) const;

  private:
    double F(const RadialField& u, double alpha) const;
    const SpectralData* sd_;
    std::shared_ptr<const detail::CubicSpline> spline_;
    double nondeg_ref_ = 0.0;  // |<d_lambda W, Lambda* g_alpha>| at alpha = 1
};

// delta = <v, g_alpha>.
double unstable_coordinate(const ModulationFrame& frame, const Modulator& mod);

struct HyperbolicCoords {
    double n_plus = 0.0;
    double n_minus = 0.0;
};

// n_pm = sqrt(k/2) (delta +- delta_dot / k); inverts
// delta = (2k)^{-1/2} (n_+ + n_-) at leading order n_pm' ~ +-k n_pm.
HyperbolicCoords hyperbolic_coords(double delta, double delta_dot, double k);

// Centered-difference delta_dot over a recorded series; end samples use
// one-sided differences.
std::vector<HyperbolicCoords> hyperbolic_series(const std::vector<double>& times,
                                                const std::vector<double>& deltas,
                                                double k);

// min over lambda (64 multiplicative seeds in [hint/4, 4*hint], then
// golden-section) of || (u - (+-W_lambda), u_t) ||_{H1xL2}.
double dist_to_soliton_curve(const WaveState& s, double lambda_hint = 1.0);

}  // namespace critwave
