#include "critwave/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "critwave/ground_state.hpp"
#include "cubic_spline.hpp"

namespace critwave {

Modulator::Modulator(const SpectralData& sd) : sd_(&sd) {
    spline_ = std::make_shared<const detail::CubicSpline>(sd.grid.dr, sd.g0.values);
    nondeg_ref_ = std::fabs(inner(eval_dlambda_W(SolitonParams{1.0}, sd.grid),
                                  adjoint_Lambda(mode_at(1.0))));
}

RadialField Modulator::mode_at(double alpha) const {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("Modulator::mode_at: alpha must be positive");
    const RadialGrid& grid = sd_->grid;
    RadialField g(grid);
    const double amp = alpha * std::sqrt(alpha);
    const detail::CubicSpline& s = *spline_;
    for (int i = 0; i < grid.n_points; ++i) g[i] = amp * s(alpha * grid.r(i));
    const double nrm = std::sqrt(inner(g, g));
    for (double& v : g.values) v /= nrm;
    return g;
}

RadialField Modulator::adjoint_mode_at(double alpha) const {
    return adjoint_Lambda(mode_at(alpha));
}

double Modulator::F(const RadialField& u, double alpha) const {
    const RadialGrid& grid = sd_->grid;
    const RadialField ga_adj = adjoint_mode_at(alpha);
    RadialField diff(grid);
    for (int i = 0; i < grid.n_points; ++i)
        diff[i] = u[i] - ground_state_value(grid.r(i), alpha);
    return inner(diff, ga_adj);
}

ModulationFrame Modulator::decompose(const RadialField& u, double alpha_guess) const {
    ModulationFrame frame;
    if (!(alpha_guess > 0.0)) return frame;
    const double lo = alpha_guess / 1.5, hi = alpha_guess * 1.5;

    double a = alpha_guess;
    double Fa = F(u, a);
    const double tol = 1e-12;
    bool converged = std::fabs(Fa) <= tol;
    for (int it = 0; it < 80 && !converged; ++it) {
        const double h = 1e-6 * a;
        const double dF = (F(u, a + h) - F(u, a - h)) / (2.0 * h);
        if (dF == 0.0 || !std::isfinite(dF)) break;
        double step = -Fa / dF;
        step = std::clamp(step, -0.25 * a, 0.25 * a);
        double a_new = std::clamp(a + step, lo, hi);
        if (a_new == a) break;
        a = a_new;
        Fa = F(u, a);
        converged = std::fabs(Fa) <= tol;
    }
    if (!converged) {
        // bisection fallback inside the bracket
        double blo = lo, bhi = hi;
        double Flo = F(u, blo), Fhi = F(u, bhi);
        if (Flo * Fhi < 0.0) {
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (blo + bhi);
                const double Fm = F(u, mid);
                if (std::fabs(Fm) <= tol || bhi - blo < 1e-15 * a) {
                    a = mid;
                    Fa = Fm;
                    converged = std::fabs(Fm) <= 1e-9;
                    break;
                }
                if (Flo * Fm <= 0.0) {
                    bhi = mid;
                    Fhi = Fm;
                } else {
                    blo = mid;
                    Flo = Fm;
                }
            }
        }
    }
    if (!converged) return frame;  // outside modulation regime

    frame.alpha = a;
    frame.ortho_residual = Fa;
    const RadialGrid& grid = sd_->grid;
    frame.v = RadialField(grid);
    for (int i = 0; i < grid.n_points; ++i)
        frame.v[i] = u[i] - ground_state_value(grid.r(i), a);
    const RadialField ga = mode_at(a);
    frame.delta = inner(frame.v, ga);
    const SolitonParams pa{a};
    frame.nondegeneracy = std::fabs(inner(eval_dlambda_W(pa, grid), adjoint_Lambda(ga)));
    frame.valid = frame.nondegeneracy >= 0.1 * nondeg_ref_;
    return frame;
}

double unstable_coordinate(const ModulationFrame& frame, const Modulator& mod) {
    if (!frame.valid) throw std::invalid_argument("unstable_coordinate: invalid frame");
    return inner(frame.v, mod.mode_at(frame.alpha));
}

HyperbolicCoords hyperbolic_coords(double delta, double delta_dot, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("hyperbolic_coords: k must be positive");
    const double s = std::sqrt(0.5 * k);
    return {s * (delta + delta_dot / k), s * (delta - delta_dot / k)};
}

std::vector<HyperbolicCoords> hyperbolic_series(const std::vector<double>& times,
                                                const std::vector<double>& deltas, double k) {
    const size_t n = times.size();
    if (deltas.size() != n || n < 3)
        throw std::invalid_argument("hyperbolic_series: need matched series of length >= 3");
    std::vector<HyperbolicCoords> out(n);
    for (size_t i = 0; i < n; ++i) {
        double dd;
        if (i == 0)
            dd = (deltas[1] - deltas[0]) / (times[1] - times[0]);
        else if (i + 1 == n)
            dd = (deltas[n - 1] - deltas[n - 2]) / (times[n - 1] - times[n - 2]);
        else
            dd = (deltas[i + 1] - deltas[i - 1]) / (times[i + 1] - times[i - 1]);
        out[i] = hyperbolic_coords(deltas[i], dd, k);
    }
    return out;
}

namespace {
double soliton_distance(const WaveState& s, double lambda, double sign) {
    const RadialGrid& grid = s.u.grid;
    RadialField diff(grid);
    for (int i = 0; i < grid.n_points; ++i)
        diff[i] = s.u[i] - sign * ground_state_value(grid.r(i), lambda);
    const RadialField d1 = derivative(diff, 1);
    const double grad2 = inner(d1, d1);
    const double kin2 = inner(s.ut, s.ut);
    return std::sqrt(std::max(0.0, grad2 + kin2));
}
}  // namespace

double dist_to_soliton_curve(const WaveState& s, double lambda_hint) {
    if (!(lambda_hint > 0.0)) throw std::invalid_argument("dist_to_soliton_curve: bad hint");
    double best = std::numeric_limits<double>::infinity();
    double best_lambda = lambda_hint;
    double best_sign = 1.0;
    for (int i = 0; i < 64; ++i) {
        const double lam = (lambda_hint / 4.0) * std::pow(16.0, i / 63.0);
        for (double sign : {1.0, -1.0}) {
            const double d = soliton_distance(s, lam, sign);
            if (d < best) {
                best = d;
                best_lambda = lam;
                best_sign = sign;
            }
        }
    }
    // golden-section refinement around the best seed
    const double ratio = std::pow(16.0, 1.0 / 63.0);
    double a = best_lambda / ratio, b = best_lambda * ratio;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = soliton_distance(s, x1, best_sign), f2 = soliton_distance(s, x2, best_sign);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = soliton_distance(s, x1, best_sign);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = soliton_distance(s, x2, best_sign);
        }
    }
    return std::min({best, f1, f2});
}

}  // namespace critwave
