#include "critwave/ground_state.hpp"

#include <cmath>
#include <stdexcept>

namespace critwave {

double ground_state_value(double r, double lambda) {
    const double x = lambda * r;
    return std::sqrt(lambda) / std::sqrt(1.0 + x * x / 3.0);
}

double ground_state_dlambda_value(double r, double lambda) {
    // d/dlambda [ sqrt(lambda) W(lambda r) ]
    //   = W(lambda r) / (2 sqrt(lambda)) + sqrt(lambda) r W'(lambda r)
    const double x = lambda * r;
    const double s = 1.0 + x * x / 3.0;
    const double Wx = 1.0 / std::sqrt(s);
    const double dWx = -(x / 3.0) / (s * std::sqrt(s));
    return 0.5 / std::sqrt(lambda) * Wx + std::sqrt(lambda) * r * dWx;
}

double lambda_W_value(double r) {
    const double s = 1.0 + r * r / 3.0;
    return (1.0 - r * r / 3.0) / (2.0 * s * std::sqrt(s));
}

namespace {
void check_lambda(const SolitonParams& p) {
    if (!(p.lambda > 0.0) || !std::isfinite(p.lambda))
        throw std::invalid_argument("SolitonParams: lambda must be positive");
}
}  // namespace

RadialField eval_W(const SolitonParams& p, const RadialGrid& grid) {
    check_lambda(p);
    RadialField out(grid);
    for (int i = 0; i < grid.n_points; ++i) out[i] = ground_state_value(grid.r(i), p.lambda);
    return out;
}

RadialField eval_dlambda_W(const SolitonParams& p, const RadialGrid& grid) {
    check_lambda(p);
    RadialField out(grid);
    for (int i = 0; i < grid.n_points; ++i) out[i] = ground_state_dlambda_value(grid.r(i), p.lambda);
    return out;
}

RadialField apply_Lambda(const RadialField& f) {
    const RadialField d1 = derivative(f, 1);
    RadialField out(f.grid);
    for (int i = 0; i < f.size(); ++i) out[i] = f.grid.r(i) * d1[i] + 0.5 * f[i];
    return out;
}

RadialField adjoint_Lambda(const RadialField& f) {
    const RadialField d1 = derivative(f, 1);
    RadialField out(f.grid);
    for (int i = 0; i < f.size(); ++i) out[i] = -f.grid.r(i) * d1[i] - 2.5 * f[i];
    return out;
}

RadialField potential_V(const SolitonParams& p, const RadialGrid& grid) {
    check_lambda(p);
    RadialField out(grid);
    for (int i = 0; i < grid.n_points; ++i) {
        const double w = ground_state_value(grid.r(i), p.lambda);
        out[i] = -5.0 * w * w * w * w;
    }
    return out;
}

RadialField eval_dlambda_V(const SolitonParams& p, const RadialGrid& grid) {
    check_lambda(p);
    RadialField out(grid);
    for (int i = 0; i < grid.n_points; ++i) {
        const double w = ground_state_value(grid.r(i), p.lambda);
        out[i] = -20.0 * w * w * w * ground_state_dlambda_value(grid.r(i), p.lambda);
    }
    return out;
}

RadialField nonlinear_remainder(const RadialField& v, const SolitonParams& p) {
    check_lambda(p);
    RadialField out(v.grid);
    for (int i = 0; i < v.size(); ++i) {
        const double w = ground_state_value(v.grid.r(i), p.lambda);
        const double s = v[i] + w;
        const double s5 = s * s * s * s * s;
        const double w4 = w * w * w * w;
        out[i] = s5 - w4 * w - 5.0 * w4 * v[i];
    }
    return out;
}

double energy(const WaveState& s) {
    if (!(s.u.grid == s.ut.grid)) throw std::invalid_argument("energy: u and ut on different grids");
    if (!s.u.all_finite() || !s.ut.all_finite())
        throw std::invalid_argument("energy: non-finite state");
    const int n = s.u.grid.n_points;
    const double dr = s.u.grid.dr;
    double kin = 0.0, pot = 0.0, grad = 0.0;
    double w_prev = 0.0;  // w = r*u, w(0) = 0
    for (int i = 0; i < n; ++i) {
        const double r = i * dr;
        const double tw = (i == 0 || i == n - 1) ? 0.5 * dr : dr;
        kin += tw * r * r * s.ut[i] * s.ut[i];
        const double u2 = s.u[i] * s.u[i];
        pot += tw * r * r * u2 * u2 * u2;
        if (i > 0) {
            const double w = r * s.u[i];
            const double dw = (w - w_prev) / dr;
            grad += dr * dw * dw;
            w_prev = w;
        }
    }
    return 4.0 * M_PI * (0.5 * kin + 0.5 * grad - pot / 6.0);
}

}  // namespace critwave
