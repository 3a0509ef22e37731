#include "critwave/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cubic_spline.hpp"

namespace critwave {

RadialField apply_H(const SolitonParams& p, const RadialField& f) {
    const int n = f.grid.n_points;
    const double dr = f.grid.dr;
    RadialField out(f.grid);
    auto w = [&](int i) { return f.grid.r(i) * f[i]; };
    {
        // r = 0: -3 f''(0) - 5 W^4(0) f(0), even extension
        const double fpp0 = 2.0 * (f[1] - f[0]) / (dr * dr);
        const double W0 = ground_state_value(0.0, p.lambda);
        out[0] = -3.0 * fpp0 - 5.0 * W0 * W0 * W0 * W0 * f[0];
    }
    for (int i = 1; i < n - 1; ++i) {
        const double lap = (w(i + 1) - 2.0 * w(i) + w(i - 1)) / (dr * dr * f.grid.r(i));
        const double Wr = ground_state_value(f.grid.r(i), p.lambda);
        out[i] = -lap - 5.0 * Wr * Wr * Wr * Wr * f[i];
    }
    {
        const int i = n - 1;
        const double wpp = (2.0 * w(i) - 5.0 * w(i - 1) + 4.0 * w(i - 2) - w(i - 3)) / (dr * dr);
        const double Wr = ground_state_value(f.grid.r(i), p.lambda);
        out[i] = -wpp / f.grid.r(i) - 5.0 * Wr * Wr * Wr * Wr * f[i];
    }
    return out;
}

namespace {

// Interior tridiagonal discretization of H acting on phi = r*g with
// Dirichlet ends: diag 2/dr^2 - 5 W^4(r_i), off-diag -1/dr^2, i = 1..n-2.
struct Tridiag {
    std::vector<double> diag;
    double off = 0.0;
    int m = 0;
};

Tridiag assemble(const RadialGrid& grid) {
    Tridiag T;
    T.m = grid.n_points - 2;
    T.off = -1.0 / (grid.dr * grid.dr);
    T.diag.resize(static_cast<size_t>(T.m));
    for (int i = 0; i < T.m; ++i) {
        const double Wr = ground_state_value(grid.r(i + 1), 1.0);
        T.diag[static_cast<size_t>(i)] = 2.0 / (grid.dr * grid.dr) - 5.0 * Wr * Wr * Wr * Wr;
    }
    return T;
}

// Sturm count: number of eigenvalues below sigma.
int sturm_count(const Tridiag& T, double sigma) {
    int count = 0;
    double q = T.diag[0] - sigma;
    if (q < 0.0) ++count;
    const double off2 = T.off * T.off;
    for (int i = 1; i < T.m; ++i) {
        if (q == 0.0) q = 1e-300;
        q = T.diag[static_cast<size_t>(i)] - sigma - off2 / q;
        if (q < 0.0) ++count;
    }
    return count;
}

// Solve (T - sigma) x = b in place (Thomas).
void shifted_solve(const Tridiag& T, double sigma, std::vector<double>& x) {
    const int m = T.m;
    std::vector<double> c(static_cast<size_t>(m));  // modified superdiagonal
    double d0 = T.diag[0] - sigma;
    if (d0 == 0.0) d0 = 1e-300;
    c[0] = T.off / d0;
    x[0] /= d0;
    for (int i = 1; i < m; ++i) {
        double d = T.diag[static_cast<size_t>(i)] - sigma - T.off * c[static_cast<size_t>(i - 1)];
        if (d == 0.0) d = 1e-300;
        c[static_cast<size_t>(i)] = T.off / d;
        x[static_cast<size_t>(i)] = (x[static_cast<size_t>(i)] - T.off * x[static_cast<size_t>(i - 1)]) / d;
    }
    for (int i = m - 2; i >= 0; --i)
        x[static_cast<size_t>(i)] -= c[static_cast<size_t>(i)] * x[static_cast<size_t>(i + 1)];
}

struct MatrixPair {
    double k0 = 0.0;
    std::vector<double> phi;  // interior eigenvector, l2(dr)-normalized
    int negative_count = 0;
};

MatrixPair lowest_pair(const RadialGrid& grid) {
    const Tridiag T = assemble(grid);
    MatrixPair out;
    out.negative_count = sturm_count(T, 0.0);
    if (out.negative_count < 1)
        throw std::runtime_error("no bound state found: discretized H has no negative eigenvalue");

    // bisect the lowest eigenvalue
    double lo = -10.0, hi = 0.0;
    while (sturm_count(T, lo) > 0) lo *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(T, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    const double lambda_est = 0.5 * (lo + hi);

    // inverse iteration with a slightly detuned shift
    const double sigma = lambda_est - 1e-9 * std::max(1.0, std::fabs(lambda_est));
    std::vector<double> x(static_cast<size_t>(T.m));
    for (int i = 0; i < T.m; ++i)
        x[static_cast<size_t>(i)] = std::exp(-grid.r(i + 1));  // deterministic start
    double rayleigh = lambda_est;
    for (int it = 0; it < 6; ++it) {
        shifted_solve(T, sigma, x);
        double nrm = 0.0;
        for (double v : x) nrm += v * v;
        nrm = std::sqrt(nrm * grid.dr);
        for (double& v : x) v /= nrm;
        // Rayleigh quotient
        double num = 0.0, den = 0.0;
        for (int i = 0; i < T.m; ++i) {
            double Ax = T.diag[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
            if (i > 0) Ax += T.off * x[static_cast<size_t>(i - 1)];
            if (i + 1 < T.m) Ax += T.off * x[static_cast<size_t>(i + 1)];
            num += x[static_cast<size_t>(i)] * Ax;
            den += x[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
        }
        rayleigh = num / den;
    }
    if (!(rayleigh < 0.0))
        throw std::runtime_error("inverse iteration failed to converge to a negative eigenvalue");
    out.k0 = std::sqrt(-rayleigh);
    out.phi = std::move(x);
    if (out.phi[0] < 0.0)
        for (double& v : out.phi) v = -v;
    return out;
}

// Integrate phi'' = (k^2 - 5 W^4) phi from phi(0)=0, phi'(0)=1 with RK4 and
// return the decaying-match miss function phi'(R) + k phi(R), rescaled to
// avoid overflow (sign is what matters).
double shooting_miss(double k, const RadialGrid& grid, int substeps) {
    const double h = grid.dr / substeps;
    const long nst = static_cast<long>(grid.n_points - 1) * substeps;
    double phi = 0.0, dphi = 1.0, r = 0.0;
    auto acc = [&](double rr, double p) {
        const double Wr = ground_state_value(rr, 1.0);
        return (k * k - 5.0 * Wr * Wr * Wr * Wr) * p;
    };
    for (long i = 0; i < nst; ++i) {
        const double k1p = dphi, k1v = acc(r, phi);
        const double k2p = dphi + 0.5 * h * k1v, k2v = acc(r + 0.5 * h, phi + 0.5 * h * k1p);
        const double k3p = dphi + 0.5 * h * k2v, k3v = acc(r + 0.5 * h, phi + 0.5 * h * k2p);
        const double k4p = dphi + h * k3v, k4v = acc(r + h, phi + h * k3p);
        phi += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        dphi += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        r += h;
        const double m = std::max(std::fabs(phi), std::fabs(dphi));
        if (m > 1e250) {
            phi /= m;
            dphi /= m;
        }
    }
    return dphi + k * phi;
}

double shooting_k0(const RadialGrid& grid) {
    const int substeps = 8;
    double lo = 0.0, hi = 0.0, mlo = 0.0;
    double prev_k = 0.0, prev_m = 0.0;
    bool have_prev = false;
    for (double k = 0.2; k <= 3.01; k += 0.2) {
        const double m = shooting_miss(k, grid, substeps);
        if (have_prev && prev_m * m < 0.0) {
            lo = prev_k;
            hi = k;
            mlo = prev_m;
            break;
        }
        prev_k = k;
        prev_m = m;
        have_prev = true;
    }
    if (hi == 0.0) throw std::runtime_error("no bound state found: shooting bracket has no sign change");
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double m = shooting_miss(mid, grid, substeps);
        if (m == 0.0) return mid;
        if (mlo * m < 0.0)
            hi = mid;
        else {
            lo = mid;
            mlo = m;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

SpectralData compute_ground_spectrum(const RadialGrid& grid, EigenMethod method) {
    SpectralData sd;
    sd.grid = grid;

    const MatrixPair mp = lowest_pair(grid);
    sd.k0_matrix = mp.k0;
    sd.negative_count = mp.negative_count;
    sd.k0_shooting = shooting_k0(grid);
    sd.k0 = (method == EigenMethod::matrix) ? sd.k0_matrix : sd.k0_shooting;

    // g0 = phi / r, parabolic even extrapolation at the origin
    sd.g0 = RadialField(grid);
    for (int i = 1; i < grid.n_points - 1; ++i)
        sd.g0[i] = mp.phi[static_cast<size_t>(i - 1)] / grid.r(i);
    sd.g0[grid.n_points - 1] = 0.0;
    sd.g0[0] = (4.0 * sd.g0[1] - sd.g0[2]) / 3.0;
    const double nrm = std::sqrt(inner(sd.g0, sd.g0));
    for (double& v : sd.g0.values) v /= nrm;
    if (sd.g0[0] < 0.0)
        for (double& v : sd.g0.values) v = -v;

    // resonance psi = Lambda W (analytic samples)
    sd.psi = RadialField(grid);
    for (int i = 0; i < grid.n_points; ++i) sd.psi[i] = lambda_W_value(grid.r(i));

    // residuals
    const SolitonParams unit{1.0};
    {
        RadialField res = apply_H(unit, sd.g0);
        for (int i = 0; i < grid.n_points; ++i) res[i] += sd.k0 * sd.k0 * sd.g0[i];
        sd.residual_eig = std::sqrt(std::max(0.0, inner(res, res)));
    }
    {
        RadialField res = apply_H(unit, sd.psi);
        const int half = grid.n_points / 2;
        for (int i = half; i < grid.n_points; ++i) res[i] = 0.0;
        sd.residual_res = std::sqrt(std::max(0.0, inner(res, res)));
    }
    return sd;
}

RescaledMode rescale_mode(const SpectralData& sd, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("rescale_mode: alpha must be positive");
    const RadialGrid& grid = sd.grid;
    detail::CubicSpline spline(grid.dr, sd.g0.values);
    RescaledMode out;
    out.k_alpha = alpha * sd.k0;
    out.g_alpha = RadialField(grid);
    const double amp = alpha * std::sqrt(alpha);
    for (int i = 0; i < grid.n_points; ++i) out.g_alpha[i] = amp * spline(alpha * grid.r(i));
    const double n2 = inner(out.g_alpha, out.g_alpha);
    if (!(n2 > 0.0)) throw std::runtime_error("rescale_mode: degenerate rescaled mode");
    const double nrm = std::sqrt(n2);
    for (double& v : out.g_alpha.values) v /= nrm;

    int resolved = 0;
    double peak = 0.0;
    for (double v : out.g_alpha.values) peak = std::max(peak, std::fabs(v));
    for (double v : out.g_alpha.values)
        if (std::fabs(v) > 1e-12 * peak) ++resolved;
    if (resolved < 8) throw std::runtime_error("rescale_mode: g_alpha under-resolved (support < 8 nodes)");
    return out;
}

RadialField project_off_mode(const RadialField& f, const RadialField& g) {
    const double gg = inner(g, g);
    if (std::fabs(gg - 1.0) > 1e-6)
        throw std::invalid_argument("project_off_mode: g must be L2-normalized");
    const double c = inner(f, g);
    RadialField out = f;
    for (int i = 0; i < out.size(); ++i) out[i] -= c * g[i];
    return out;
}

}  // namespace critwave
