#include "critwave/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "critwave/ground_state.hpp"
#include "critwave/modulation.hpp"

namespace critwave {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double intercept, r2;
    return fit_slope_r2(x, y, &intercept, &r2);
}

double fit_slope_r2(const std::vector<double>& x, const std::vector<double>& y, double* intercept,
                    double* r2) {
    const size_t n = x.size();
    if (y.size() != n || n < 2) throw std::invalid_argument("fit_slope: need matched series, n >= 2");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / det;
    const double b = (sy - slope * sx) / n;
    if (intercept) *intercept = b;
    if (r2) {
        double ss_res = 0, ss_tot = 0;
        const double ybar = sy / n;
        for (size_t i = 0; i < n; ++i) {
            const double f = slope * x[i] + b;
            ss_res += (y[i] - f) * (y[i] - f);
            ss_tot += (y[i] - ybar) * (y[i] - ybar);
        }
        *r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    }
    return slope;
}

double w11_norm(const RadialField& f) {
    const RadialField d1 = derivative(f, 1);
    RadialField dens(f.grid);
    for (int i = 0; i < f.size(); ++i) dens[i] = std::fabs(f[i]) + std::fabs(d1[i]);
    return integrate_radial(dens);
}

double w21_norm(const RadialField& f) {
    const RadialField d1 = derivative(f, 1);
    const RadialField lap = radial_laplacian(f);
    RadialField dens(f.grid);
    for (int i = 0; i < f.size(); ++i)
        dens[i] = std::fabs(f[i]) + std::fabs(d1[i]) + std::fabs(lap[i]);
    return integrate_radial(dens);
}

namespace {

size_t frames_valid_count(const TrajectoryRecord& traj) {
    size_t n = 0;
    while (n < traj.times.size() && std::isfinite(traj.alpha[n])) ++n;
    return n;
}

// Frames usable for radiation read-offs: valid modulation frames, censored
// at the first |delta| past max(delta_floor, 10 * median) after the minimum
// (the bisected reference's residual unstable component grows like
// (bracket/2) e^{k t} and eventually masks u_*).
size_t censored_frames(const TrajectoryRecord& traj, double delta_floor) {
    const size_t nv0 = frames_valid_count(traj);
    if (nv0 == 0) return 0;
    size_t i_min = 0;
    double d_min = std::numeric_limits<double>::infinity();
    std::vector<double> mags;
    mags.reserve(nv0);
    for (size_t i = 0; i < nv0; ++i) {
        const double m = std::fabs(traj.delta[i]);
        mags.push_back(m);
        if (m < d_min) {
            d_min = m;
            i_min = i;
        }
    }
    std::nth_element(mags.begin(), mags.begin() + static_cast<long>(nv0 / 2), mags.end());
    const double cap = std::max({delta_floor, 10.0 * mags[nv0 / 2], 1e-9});
    for (size_t i = i_min; i < nv0; ++i)
        if (std::fabs(traj.delta[i]) > cap) return i;
    return nv0;
}

double late_median(const std::vector<double>& v, size_t n_valid) {
    std::vector<double> tail;
    const size_t start = n_valid > n_valid / 4 ? n_valid - n_valid / 4 : 0;
    for (size_t i = start; i < n_valid; ++i)
        if (std::isfinite(v[i])) tail.push_back(v[i]);
    if (tail.empty()) return 1.0;
    std::sort(tail.begin(), tail.end());
    return tail[tail.size() / 2];
}

}  // namespace

DispersiveReport measure_radiation(const TrajectoryRecord& traj, double delta_floor) {
    DispersiveReport rep;
    rep.probe_radii = traj.probe_radii;
    const size_t nv = censored_frames(traj, delta_floor);
    if (nv < 8) throw std::invalid_argument("measure_radiation: too few valid frames");
    rep.truncated = nv < traj.times.size();
    rep.valid_until = traj.times[nv - 1];

    // sup-norm decay fit on [5, t_valid]
    std::vector<double> lx, ly;
    for (size_t i = 0; i < nv; ++i) {
        const double t = traj.times[i];
        if (t < 5.0) continue;
        if (traj.v_sup[i] <= 0.0) continue;
        lx.push_back(std::log(t));
        ly.push_back(std::log(traj.v_sup[i]));
    }
    if (lx.size() < 4) throw std::runtime_error("measure_radiation: decay-fit window too short");
    rep.fit_t0 = std::exp(lx.front());
    rep.fit_t1 = std::exp(lx.back());
    rep.sup_decay_slope = fit_slope(lx, ly);

    // partial integrals of |v| at the probes (trapezoid over the record mesh)
    rep.partial_times.assign(traj.times.begin(), traj.times.begin() + static_cast<long>(nv));
    rep.partial_integrals.resize(nv);
    std::array<double, 4> acc{};
    rep.partial_integrals[0] = acc;
    for (size_t i = 1; i < nv; ++i) {
        const double dt = traj.times[i] - traj.times[i - 1];
        for (size_t j = 0; j < 4; ++j)
            acc[j] += 0.5 * dt * (std::fabs(traj.v_probe[i][j]) + std::fabs(traj.v_probe[i - 1][j]));
        rep.partial_integrals[i] = acc;
    }
    auto integral_at = [&](double T, size_t j) {
        size_t i = 0;
        while (i + 1 < nv && rep.partial_times[i + 1] <= T) ++i;
        return rep.partial_integrals[i][j];
    };
    const double T = rep.partial_times.back();
    for (size_t j = 0; j < 4; ++j) {
        const double I4 = integral_at(T / 4.0, j), I2 = integral_at(T / 2.0, j), I1 = integral_at(T, j);
        rep.tail_ratio[j] = I2 > 0.0 ? (I1 - I2) / I2 : 0.0;
        rep.tail_ratio_half[j] = I4 > 0.0 ? (I2 - I4) / I4 : 0.0;
    }

    // dilation parameter series
    rep.alpha_inf = late_median(traj.alpha, nv);
    rep.a_times.assign(traj.times.begin(), traj.times.begin() + static_cast<long>(nv));
    rep.a_series.assign(traj.alpha.begin(), traj.alpha.begin() + static_cast<long>(nv));
    rep.a_avg_series.resize(nv, 0.0);
    double run = 0.0;
    for (size_t i = 1; i < nv; ++i) {
        const double dt = traj.times[i] - traj.times[i - 1];
        run += 0.5 * dt * ((rep.alpha_inf - traj.alpha[i]) + (rep.alpha_inf - traj.alpha[i - 1]));
        rep.a_avg_series[i] = run;
        rep.alpha_avg_sup = std::max(rep.alpha_avg_sup, std::fabs(run));
        rep.alpha_avg_bound =
            std::max(rep.alpha_avg_bound, traj.times[i] * std::fabs(rep.alpha_inf - traj.alpha[i]));
    }
    rep.alpha_avg_bound *= 5.0;

    // |alpha - alpha_inf| log-log fit over [5, 0.8 t_valid]
    lx.clear();
    ly.clear();
    for (size_t i = 0; i < nv; ++i) {
        const double t = traj.times[i];
        if (t < 5.0 || t > 0.8 * rep.valid_until) continue;
        const double d = std::fabs(traj.alpha[i] - rep.alpha_inf);
        if (d < 1e-13) continue;
        lx.push_back(std::log(t));
        ly.push_back(std::log(d));
    }
    rep.alpha_decay_slope = lx.size() >= 4 ? fit_slope(lx, ly) : 0.0;
    return rep;
}

LinearDispersiveReport linear_dispersive_check(const RadialField& f, LinearDataMode mode,
                                               PotentialMode potential, const SpectralData& sd,
                                               const LinearCheckConfig& cfg) {
    LinearDispersiveReport rep;
    rep.probe_radii = cfg.probe_radii;
    const RadialGrid& grid = sd.grid;
    if (!(f.grid == grid)) throw std::invalid_argument("linear_dispersive_check: grid mismatch");

    rep.data_norm = (mode == LinearDataMode::sin_mode) ? w11_norm(f) : w21_norm(f);

    const bool want_plateau =
        potential == PotentialMode::with_potential && mode == LinearDataMode::sin_mode;
    SolverConfig scfg;
    scfg.cfl = (potential == PotentialMode::with_potential) ? std::min(cfg.cfl, 0.5) : cfg.cfl;
    scfg.t_max = cfg.t_max;
    scfg.record_stride = std::max(1, static_cast<int>(std::lround(0.08 / (scfg.cfl * grid.dr))));
    scfg.store_snapshots = want_plateau;
    scfg.causal_margin = 2.0;

    EvolutionProbes probes;
    probes.spectrum = &sd;
    probes.support_radius = cfg.support_radius;
    probes.probe_radii = cfg.probe_radii;

    WaveState s0;
    s0.t = 0.0;
    if (mode == LinearDataMode::cos_mode) {
        s0.u = f;
        s0.ut = RadialField(grid);
    } else {
        s0.u = RadialField(grid);
        s0.ut = f;
    }
    const bool project = potential == PotentialMode::with_potential;
    const TrajectoryRecord traj =
        evolve_linear(s0, SolitonParams{1.0}, scfg, potential, probes, project);
    const size_t n = traj.times.size();
    if (n < 16) throw std::runtime_error("linear_dispersive_check: run too short");

    std::array<int, 4> pidx{};
    for (size_t j = 0; j < 4; ++j) pidx[j] = grid.index_at(cfg.probe_radii[j]);

    // g0-projected probe values (P_c up to the resonance)
    std::vector<std::array<double, 4>> proj(n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < 4; ++j) {
            double val = traj.u_probe[i][j];
            if (project) val -= traj.mode_coeff[i] * sd.g0[pidx[j]];
            proj[i][j] = val;
        }
    }

    // empirical resonance plateau: last-quarter time average of the
    // projected field (sin mode with potential only)
    std::vector<double> plateau_probe(4, 0.0);
    if (want_plateau) {
        const size_t q0 = 3 * n / 4;
        std::vector<double> avg(static_cast<size_t>(grid.n_points), 0.0);
        std::vector<double> avg_a(static_cast<size_t>(grid.n_points), 0.0);
        std::vector<double> avg_b(static_cast<size_t>(grid.n_points), 0.0);
        const size_t half = q0 + (n - q0) / 2;
        for (size_t i = q0; i < n; ++i) {
            const double c = traj.mode_coeff[i];
            for (int k = 0; k < grid.n_points; ++k) {
                const double v = traj.snapshots[i][static_cast<size_t>(k)] - c * sd.g0[k];
                avg[static_cast<size_t>(k)] += v;
                (i < half ? avg_a : avg_b)[static_cast<size_t>(k)] += v;
            }
        }
        for (auto& v : avg) v /= static_cast<double>(n - q0);
        for (auto& v : avg_a) v /= static_cast<double>(half - q0);
        for (auto& v : avg_b) v /= static_cast<double>(n - half);
        rep.plateau_field = avg;
        for (size_t j = 0; j < 4; ++j) plateau_probe[j] = avg[static_cast<size_t>(pidx[j])];

        // stationarity of the plateau across the two sub-windows
        double num = 0.0, den = 0.0;
        for (size_t k = 0; k < avg.size(); ++k) {
            num += (avg_a[k] - avg_b[k]) * (avg_a[k] - avg_b[k]);
            den += avg[k] * avg[k];
        }
        rep.plateau_variation = den > 0.0 ? std::sqrt(num / den) : 0.0;
        rep.plateau_reliable = rep.plateau_variation <= 0.2;

        // shape correlation with Lambda W on r <= 10
        RadialField pf(grid), lw(grid);
        const int j10 = grid.index_at(10.0);
        for (int k = 0; k <= j10; ++k) {
            pf[k] = avg[static_cast<size_t>(k)];
            lw[k] = lambda_W_value(grid.r(k));
        }
        const double nn = inner(pf, lw);
        const double na = std::sqrt(inner(pf, pf)), nb = std::sqrt(inner(lw, lw));
        rep.plateau_cosine_vs_LamW = (na > 0.0 && nb > 0.0) ? nn / (na * nb) : 0.0;
    }

    // L_t^1 partial integrals at the probes, plateau subtracted
    std::array<double, 4> I{}, I_half{}, I_quarter{};
    const double t_end = traj.times.back();
    for (size_t i = 1; i < n; ++i) {
        const double dt = traj.times[i] - traj.times[i - 1];
        for (size_t j = 0; j < 4; ++j) {
            const double a = std::fabs(proj[i - 1][j] - plateau_probe[j]);
            const double b = std::fabs(proj[i][j] - plateau_probe[j]);
            I[j] += 0.5 * dt * (a + b);
            if (traj.times[i] <= 0.5 * t_end) I_half[j] = I[j];
            if (traj.times[i] <= 0.25 * t_end) I_quarter[j] = I[j];
        }
    }
    rep.partial_integral = I;
    for (size_t j = 0; j < 4; ++j) {
        rep.tail_ratio[j] = I_half[j] > 0.0 ? (I[j] - I_half[j]) / I_half[j] : 0.0;
        rep.tail_ratio_half[j] = I_quarter[j] > 0.0 ? (I_half[j] - I_quarter[j]) / I_quarter[j] : 0.0;
    }
    rep.ratio = *std::max_element(I.begin(), I.end()) / rep.data_norm;

    // Huygens saturation at the origin (free cos mode); the light cone is
    // set by the data's actual support, not the configured family radius
    if (potential == PotentialMode::free && mode == LinearDataMode::cos_mode) {
        double r_supp = 0.0;
        for (int i = 0; i < grid.n_points; ++i)
            if (f[i] != 0.0) r_supp = grid.r(i);
        for (size_t i = 0; i < n; ++i) {
            if (traj.times[i] <= r_supp + 2.0 * grid.dr) continue;
            rep.huygens_residual = std::max(rep.huygens_residual, std::fabs(traj.u_probe[i][0]));
        }
    }
    return rep;
}

GammaSeries phase_correction(const TrajectoryRecord& traj, const SpectralData& sd) {
    if (traj.snapshots.empty())
        throw std::invalid_argument("phase_correction: trajectory must carry snapshots");
    GammaSeries out;
    const size_t nv = censored_frames(traj, 0.0);
    if (nv < 4) throw std::invalid_argument("phase_correction: too few valid frames");
    out.alpha_inf = late_median(traj.alpha, nv);

    const RadialGrid& grid = sd.grid;
    const Modulator mod(sd);
    const RadialField g_inf = mod.mode_at(out.alpha_inf);
    const SolitonParams pinf{out.alpha_inf};
    const RadialField dlV = eval_dlambda_V(pinf, grid);

    // constant pairing <dV/dlambda g, g>
    RadialField tmp(grid);
    for (int i = 0; i < grid.n_points; ++i) tmp[i] = dlV[i] * g_inf[i];
    const double c_pair = inner(tmp, g_inf);

    // W_{alpha_inf}^3 g_inf, reused each sample
    RadialField w3g(grid);
    for (int i = 0; i < grid.n_points; ++i) {
        const double Wr = ground_state_value(grid.r(i), out.alpha_inf);
        w3g[i] = Wr * Wr * Wr * g_inf[i];
    }

    std::vector<double> integrand(nv);
    for (size_t i = 0; i < nv; ++i) {
        RadialField vW3g(grid);
        for (int j = 0; j < grid.n_points; ++j) {
            const double v = traj.snapshots[i][static_cast<size_t>(j)] -
                             ground_state_value(grid.r(j), traj.alpha[i]);
            vW3g[j] = v * w3g[j];
        }
        integrand[i] = inner(vW3g, g_inf) + (out.alpha_inf - traj.alpha[i]) * c_pair;
    }
    out.times.resize(nv);
    out.gamma.resize(nv);
    out.times[0] = traj.times[0];
    out.gamma[0] = 0.0;
    double gmin = 0.0, gmax = 0.0;
    for (size_t i = 1; i < nv; ++i) {
        const double dt = traj.times[i] - traj.times[i - 1];
        out.times[i] = traj.times[i];
        out.gamma[i] = out.gamma[i - 1] + 0.5 * dt * (integrand[i] + integrand[i - 1]);
        gmin = std::min(gmin, out.gamma[i]);
        gmax = std::max(gmax, out.gamma[i]);
    }
    // Gamma(s,t) = Gamma(0,t) - Gamma(0,s), so the sup over the mesh is the spread
    out.sup_abs = gmax - gmin;
    return out;
}

}  // namespace critwave
