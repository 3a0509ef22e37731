#pragma once

#include "critwave/grid.hpp"
#include "critwave/ground_state.hpp"

namespace critwave {

enum class EigenMethod { shooting, matrix };

// Certificate for the linearized operator H = -Laplacian - 5 W^4 on a grid.
//
// (k0, g0) is always the exact lowest eigenpair of the symmetric tridiagonal
// discretization of H in the r^2 dr measure (phi = r*g substitution), so the
// residual under apply_H on the same grid is round-off level. k0_shooting is
// the continuum estimate from integrating the radial ODE with fine RK4
// substeps; agreement with k0_matrix degrades as C*dr^2 with C ~ 0.11, so
// the 1e-5 cross-check needs dr <= 0.005.
struct SpectralData {
    RadialGrid grid;
    double k0 = 0.0;            // sqrt of |negative eigenvalue| (selected method)
    RadialField g0;             // L2-normalized, positive, g0(0) > 0
    RadialField psi;            // resonance Lambda W, psi(0) = Lambda W(0) = 1/2
    double residual_eig = 0.0;  // ||H g0 + k0^2 g0||_L2
    double residual_res = 0.0;  // ||H(Lambda W)||_L2 on r <= r_max/2
    double k0_shooting = 0.0;
    double k0_matrix = 0.0;
    int negative_count = -1;    // inertia of the discretized H below 0
};

// -(f'' + (2/r) f') - 5 W_lambda^4 f computed through the w = r*f frame
// (consistent with both the eigen-solver and the time stepper); r = 0 limit
// is -3 f''(0) - 5 W_lambda^4(0) f(0).
RadialField apply_H(const SolitonParams& p, const RadialField& f);

// Lowest eigenpair of H. Both methods always run; `method` selects which
// estimate lands in k0. Throws if no bound state is bracketed (a
// discretization bug: the operator has exactly one negative eigenvalue).
SpectralData compute_ground_spectrum(const RadialGrid& grid,
                                     EigenMethod method = EigenMethod::matrix);

struct RescaledMode {
    double k_alpha = 0.0;
    RadialField g_alpha;
};

// k_alpha = alpha k0, g_alpha(r) = alpha^{3/2} g0(alpha r) via cubic
// interpolation, re-normalized in L2. Throws when alpha leaves the mode
// resolved by fewer than 8 nodes.
RescaledMode rescale_mode(const SpectralData& sd, double alpha);

// f - <f,g> g for unit g; idempotent.
RadialField project_off_mode(const RadialField& f, const RadialField& g);

}  // namespace critwave
