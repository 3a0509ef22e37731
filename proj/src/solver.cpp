#include "critwave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "critwave/modulation.hpp"

namespace critwave {

void SolverConfig::validate() const {
    if (!(cfl > 0.0) || cfl > 1.0) throw std::invalid_argument("solver: cfl out of (0,1]");
    if (!(t_max > 0.0)) throw std::invalid_argument("solver: t_max must be positive");
    if (record_stride < 1) throw std::invalid_argument("solver: record_stride must be >= 1");
    if (!(blowup_sup_threshold > 0.0)) throw std::invalid_argument("solver: blowup threshold must be positive");
}

const char* Outcome::name(Tag t) {
    switch (t) {
        case Tag::blowup: return "Blowup";
        case Tag::decay: return "Decay";
        default: return "Undetermined";
    }
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Acceleration Lap u + u^5 on [0, j_act]; the Laplacian runs through
// w = r*u, so with integer radii the stencil reduces to
// ((i+1) u_{i+1} - 2 i u_i + (i-1) u_{i-1}) / (i dr^2).
void accel(const std::vector<double>& u, std::vector<double>& a, int j_act, double dr,
           bool nonlinear, int n) {
    const double inv_dr2 = 1.0 / (dr * dr);
    a[0] = 6.0 * (u[1] - u[0]) * inv_dr2;
    const int last = std::min(j_act, n - 2);
    for (int i = 1; i <= last; ++i) {
        a[static_cast<size_t>(i)] =
            ((i + 1) * u[static_cast<size_t>(i + 1)] - 2.0 * i * u[static_cast<size_t>(i)] +
             (i - 1) * u[static_cast<size_t>(i - 1)]) *
            inv_dr2 / i;
    }
    if (nonlinear) {
        for (int i = 0; i <= last; ++i) {
            const double q = u[static_cast<size_t>(i)];
            const double q2 = q * q;
            a[static_cast<size_t>(i)] += q2 * q2 * q;
        }
    }
}

struct LocalProbe {
    double energy = 0.0;  // positive-density energy on r <= 2R
    double sup = 0.0;
};

LocalProbe local_probe(const std::vector<double>& u, const std::vector<double>& v, int j2R,
                       double dr) {
    LocalProbe out;
    double acc = 0.0;
    for (int i = 0; i <= j2R; ++i) {
        const double r = i * dr;
        const double du = (i == 0) ? 0.0
                                   : (i + 1 < static_cast<int>(u.size())
                                          ? (u[static_cast<size_t>(i + 1)] - u[static_cast<size_t>(i - 1)]) / (2.0 * dr)
                                          : 0.0);
        const double q = u[static_cast<size_t>(i)];
        const double q2 = q * q;
        const double dens = 0.5 * v[static_cast<size_t>(i)] * v[static_cast<size_t>(i)] +
                            0.5 * du * du + q2 * q2 * q2 / 6.0;
        const double w = (i == 0 || i == j2R) ? 0.5 * dr : dr;
        acc += w * dens * r * r;
        out.sup = std::max(out.sup, std::fabs(q));
    }
    out.energy = 4.0 * M_PI * acc;
    return out;
}

double conserved_energy(const std::vector<double>& u, const std::vector<double>& v, double dr) {
    const int n = static_cast<int>(u.size());
    double kin = 0.0, pot = 0.0, grad = 0.0;
    double w_prev = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = i * dr;
        const double tw = (i == 0 || i == n - 1) ? 0.5 * dr : dr;
        kin += tw * r * r * v[static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
        const double q = u[static_cast<size_t>(i)];
        const double q2 = q * q;
        pot += tw * r * r * q2 * q2 * q2;
        if (i > 0) {
            const double w = r * q;
            const double dw = (w - w_prev) / dr;
            grad += dr * dw * dw;
            w_prev = w;
        }
    }
    return 4.0 * M_PI * (0.5 * kin + 0.5 * grad - pot / 6.0);
}

}  // namespace

WaveState step_nonlinear(const WaveState& s, const SolverConfig& cfg) {
    cfg.validate();
    if (!(s.u.grid == s.ut.grid)) throw std::invalid_argument("step_nonlinear: mismatched grids");
    const int n = s.u.grid.n_points;
    const double dr = s.u.grid.dr;
    const double dt = cfg.dt(dr);
    const bool nl = !cfg.drop_nonlinearity;

    std::vector<double> a1(n), a2(n), a3(n), a4(n), u2(n), u3(n), u4(n), v2(n), v3(n), v4(n);
    const std::vector<double>& u = s.u.values;
    const std::vector<double>& v = s.ut.values;
    accel(u, a1, n - 2, dr, nl, n);
    for (int i = 0; i < n - 1; ++i) {
        u2[i] = u[i] + 0.5 * dt * v[i];
        v2[i] = v[i] + 0.5 * dt * a1[i];
    }
    u2[n - 1] = u[n - 1];
    v2[n - 1] = v[n - 1];
    accel(u2, a2, n - 2, dr, nl, n);
    for (int i = 0; i < n - 1; ++i) {
        u3[i] = u[i] + 0.5 * dt * v2[i];
        v3[i] = v[i] + 0.5 * dt * a2[i];
    }
    u3[n - 1] = u[n - 1];
    v3[n - 1] = v[n - 1];
    accel(u3, a3, n - 2, dr, nl, n);
    for (int i = 0; i < n - 1; ++i) {
        u4[i] = u[i] + dt * v3[i];
        v4[i] = v[i] + dt * a3[i];
    }
    u4[n - 1] = u[n - 1];
    v4[n - 1] = v[n - 1];
    accel(u4, a4, n - 2, dr, nl, n);

    WaveState out = s;
    out.t = s.t + dt;
    for (int i = 0; i < n - 1; ++i) {
        out.u.values[i] = u[i] + dt / 6.0 * (v[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
        out.ut.values[i] = v[i] + dt / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
    }
    return out;
}

TrajectoryRecord evolve(const WaveState& s0, const SolverConfig& cfg, const EvolutionProbes& probes) {
    cfg.validate();
    if (!(s0.u.grid == s0.ut.grid)) throw std::invalid_argument("evolve: mismatched grids");
    const RadialGrid grid = s0.u.grid;
    const int n = grid.n_points;
    const double dr = grid.dr;
    const double dt = cfg.dt(dr);
    const bool nl = !cfg.drop_nonlinearity;
    const double R = probes.support_radius;

    TrajectoryRecord rec;
    rec.probe_radii = probes.probe_radii;
    rec.frames_valid_until = 0.0;

    // modulation tracking
    std::unique_ptr<Modulator> mod;
    double alpha_guess = probes.background_lambda.value_or(1.0);
    bool frames_ok = probes.spectrum != nullptr;
    if (probes.spectrum) mod = std::make_unique<Modulator>(*probes.spectrum);

    std::vector<double> u = s0.u.values, v = s0.ut.values;
    std::vector<double> a1(n), a2(n), a3(n), a4(n), u2(n), u3(n), u4(n), v2(n), v3(n), v4(n);

    const int j2R = std::min(n - 1, grid.index_at(2.0 * R));
    std::array<int, 4> pidx{};
    for (size_t j = 0; j < 4; ++j) pidx[j] = grid.index_at(probes.probe_radii[j]);

    const LocalProbe init = local_probe(u, v, j2R, dr);
    const double e_loc_floor = cfg.decay_local_energy_threshold * std::max(init.energy, 1e-12);
    const double sup_floor = cfg.decay_sup_threshold * std::max(init.sup, 1e-12);

    const long n_steps = static_cast<long>(std::llround(cfg.t_max / dt));
    double t = s0.t;
    double dwell_start = -1.0;
    bool classified = false;

    auto record_row = [&](double tt) {
        rec.times.push_back(tt);
        rec.energy.push_back(conserved_energy(u, v, dr));
        const LocalProbe lp = local_probe(u, v, j2R, dr);
        rec.local_energy.push_back(lp.energy);
        double sup = 0.0;
        for (double q : u) sup = std::max(sup, std::fabs(q));
        rec.sup_norm.push_back(sup);
        std::array<double, 4> up{};
        for (size_t j = 0; j < 4; ++j) up[j] = u[static_cast<size_t>(pidx[j])];
        rec.u_probe.push_back(up);
        rec.mode_coeff.push_back(kNaN);

        if (!std::isfinite(sup)) frames_ok = false;
        if (frames_ok) {
            RadialField uf(grid);
            uf.values = u;
            ModulationFrame fr = mod->decompose(uf, alpha_guess);
            if (fr.valid && std::fabs(fr.delta) <= 0.5 && fr.alpha > 0.25 && fr.alpha < 4.0) {
                alpha_guess = fr.alpha;
                rec.alpha.push_back(fr.alpha);
                rec.delta.push_back(fr.delta);
                rec.ortho_res.push_back(fr.ortho_residual);
                const FieldNorms vn = norms(fr.v);
                rec.v_l2.push_back(vn.l2);
                rec.v_h1.push_back(vn.h1_seminorm);
                rec.v_h2.push_back(vn.h2);
                rec.v_sup.push_back(vn.sup);
                std::array<double, 4> vp{};
                for (size_t j = 0; j < 4; ++j) vp[j] = fr.v[pidx[j]];
                rec.v_probe.push_back(vp);
                rec.frames_valid_until = tt;
            } else {
                frames_ok = false;
            }
        }
        if (!frames_ok) {
            rec.alpha.push_back(kNaN);
            rec.delta.push_back(kNaN);
            rec.ortho_res.push_back(kNaN);
            rec.v_l2.push_back(kNaN);
            rec.v_h1.push_back(kNaN);
            rec.v_h2.push_back(kNaN);
            rec.v_sup.push_back(kNaN);
            rec.v_probe.push_back({kNaN, kNaN, kNaN, kNaN});
        }
        if (cfg.store_snapshots) rec.snapshots.push_back(u);
    };

    record_row(t);

    for (long step = 0; step < n_steps && !classified; ++step) {
        const double t_next = s0.t + (step + 1) * dt;
        // causality: diagnostics live inside r <= R + t; beyond-window state is pinned
        if (R + (t_next - s0.t) + cfg.causal_margin >= grid.r_max()) {
            rec.outcome = {Outcome::Tag::undetermined, t, "causality window exhausted"};
            classified = true;
            break;
        }
        const int j_act =
            std::min(n - 2, static_cast<int>(std::floor((R + (t_next - s0.t)) / dr)) + 1);

        accel(u, a1, j_act, dr, nl, n);
        for (int i = 0; i <= j_act; ++i) {
            u2[i] = u[i] + 0.5 * dt * v[i];
            v2[i] = v[i] + 0.5 * dt * a1[i];
        }
        u2[j_act + 1] = u[j_act + 1];
        if (j_act + 2 < n) u2[j_act + 2] = u[j_act + 2];
        accel(u2, a2, j_act, dr, nl, n);
        for (int i = 0; i <= j_act; ++i) {
            u3[i] = u[i] + 0.5 * dt * v2[i];
            v3[i] = v[i] + 0.5 * dt * a2[i];
        }
        u3[j_act + 1] = u[j_act + 1];
        if (j_act + 2 < n) u3[j_act + 2] = u[j_act + 2];
        accel(u3, a3, j_act, dr, nl, n);
        for (int i = 0; i <= j_act; ++i) {
            u4[i] = u[i] + dt * v3[i];
            v4[i] = v[i] + dt * a3[i];
        }
        u4[j_act + 1] = u[j_act + 1];
        if (j_act + 2 < n) u4[j_act + 2] = u[j_act + 2];
        accel(u4, a4, j_act, dr, nl, n);
        for (int i = 0; i <= j_act; ++i) {
            u[i] += dt / 6.0 * (v[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
            v[i] += dt / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
        }
        t = t_next;

        // blowup watch every step; NaN fails the comparison and lands here too
        double dev = 0.0;
        if (probes.background_lambda) {
            for (int i = 0; i <= j_act; ++i) {
                const double b = ground_state_value(i * dr, *probes.background_lambda);
                dev = std::max(dev, std::fabs(u[static_cast<size_t>(i)] - b));
            }
        } else {
            for (int i = 0; i <= j_act; ++i) dev = std::max(dev, std::fabs(u[static_cast<size_t>(i)]));
        }
        if (!(dev < cfg.blowup_sup_threshold)) {
            rec.outcome = {Outcome::Tag::blowup, t, "sup threshold crossed"};
            classified = true;
            record_row(t);
            break;
        }

        if ((step + 1) % cfg.record_stride == 0) {
            record_row(t);
            const LocalProbe lp = local_probe(u, v, j2R, dr);
            if (lp.energy <= e_loc_floor && lp.sup <= sup_floor) {
                if (dwell_start < 0.0) dwell_start = t;
                if (t - dwell_start >= cfg.dwell_time) {
                    rec.outcome = {Outcome::Tag::decay, t, "local energy and sup below thresholds"};
                    classified = true;
                }
            } else {
                dwell_start = -1.0;
            }
        }
    }
    if (!classified) rec.outcome = {Outcome::Tag::undetermined, t, "t_max reached"};
    return rec;
}

TrajectoryRecord evolve_linear(const WaveState& s0, const SolitonParams& p, const SolverConfig& cfg,
                               PotentialMode mode, const EvolutionProbes& probes,
                               bool project_unstable) {
    cfg.validate();
    if (!(s0.u.grid == s0.ut.grid)) throw std::invalid_argument("evolve_linear: mismatched grids");
    if (project_unstable && probes.spectrum == nullptr)
        throw std::invalid_argument("evolve_linear: project_unstable needs a spectrum");
    const RadialGrid grid = s0.u.grid;
    const int n = grid.n_points;
    const double dr = grid.dr;
    const double dt = cfg.dt(dr);
    const double R = probes.support_radius;

    TrajectoryRecord rec;
    rec.probe_radii = probes.probe_radii;
    std::array<int, 4> pidx{};
    for (size_t j = 0; j < 4; ++j) pidx[j] = grid.index_at(probes.probe_radii[j]);

    std::vector<double> pot(n, 0.0);
    if (mode == PotentialMode::with_potential) {
        for (int i = 0; i < n; ++i) {
            const double Wr = ground_state_value(i * dr, p.lambda);
            pot[static_cast<size_t>(i)] = 5.0 * Wr * Wr * Wr * Wr;
        }
    }

    // discrete-exact unstable direction in the w frame
    std::vector<double> phi0;
    if (project_unstable) {
        phi0.resize(static_cast<size_t>(n));
        double nrm = 0.0;
        for (int i = 0; i < n; ++i) {
            phi0[static_cast<size_t>(i)] = i * dr * probes.spectrum->g0[i];
            nrm += phi0[static_cast<size_t>(i)] * phi0[static_cast<size_t>(i)];
        }
        nrm = std::sqrt(nrm * dr);
        for (double& q : phi0) q /= nrm;
    }
    auto deflate = [&](std::vector<double>& w) {
        double c = 0.0;
        for (int i = 0; i < n; ++i) c += w[static_cast<size_t>(i)] * phi0[static_cast<size_t>(i)];
        c *= dr;
        for (int i = 0; i < n; ++i) w[static_cast<size_t>(i)] -= c * phi0[static_cast<size_t>(i)];
    };

    std::vector<double> w_prev(n), w_cur(n), w_next(n);
    for (int i = 0; i < n; ++i) w_prev[static_cast<size_t>(i)] = i * dr * s0.u[i];

    auto Lw = [&](const std::vector<double>& w, int i) {
        double out = (w[static_cast<size_t>(i + 1)] - 2.0 * w[static_cast<size_t>(i)] +
                      w[static_cast<size_t>(i - 1)]) /
                     (dr * dr);
        if (mode == PotentialMode::with_potential) out += pot[static_cast<size_t>(i)] * w[static_cast<size_t>(i)];
        return out;
    };

    // first step: exact half-evolution for (f,0) data at the magic step,
    // Taylor start otherwise
    const bool magic = (mode == PotentialMode::free) && std::fabs(cfg.cfl - 1.0) < 1e-14;
    bool zero_ut = true;
    for (int i = 0; i < n; ++i)
        if (s0.ut[i] != 0.0) zero_ut = false;
    if (magic && zero_ut) {
        w_cur[0] = 0.0;
        for (int i = 1; i < n - 1; ++i)
            w_cur[static_cast<size_t>(i)] =
                0.5 * (w_prev[static_cast<size_t>(i + 1)] + w_prev[static_cast<size_t>(i - 1)]);
        w_cur[static_cast<size_t>(n - 1)] = w_prev[static_cast<size_t>(n - 1)];
    } else {
        w_cur[0] = 0.0;
        for (int i = 1; i < n - 1; ++i)
            w_cur[static_cast<size_t>(i)] = w_prev[static_cast<size_t>(i)] + dt * (i * dr) * s0.ut[i] +
                                            0.5 * dt * dt * Lw(w_prev, i);
        w_cur[static_cast<size_t>(n - 1)] = w_prev[static_cast<size_t>(n - 1)];
    }
    if (project_unstable) {
        deflate(w_prev);
        deflate(w_cur);
    }

    const long n_steps = static_cast<long>(std::llround(cfg.t_max / dt));
    double t = s0.t + dt;

    auto record_row = [&](double tt) {
        RadialField uf(grid);
        for (int i = 1; i < n; ++i) uf[i] = w_cur[static_cast<size_t>(i)] / (i * dr);
        uf[0] = (4.0 * uf[1] - uf[2]) / 3.0;
        rec.times.push_back(tt);
        double kin = 0.0, grad = 0.0, potE = 0.0;
        for (int i = 0; i < n; ++i) {
            const double tw = (i == 0 || i == n - 1) ? 0.5 * dr : dr;
            const double wt = (i < n - 1 && i > 0)
                                  ? (w_next[static_cast<size_t>(i)] - w_prev[static_cast<size_t>(i)]) / (2.0 * dt)
                                  : 0.0;
            kin += tw * wt * wt;
            if (i > 0)
                grad += dr * std::pow((w_cur[static_cast<size_t>(i)] - w_cur[static_cast<size_t>(i - 1)]) / dr, 2);
            potE -= tw * pot[static_cast<size_t>(i)] * w_cur[static_cast<size_t>(i)] * w_cur[static_cast<size_t>(i)];
        }
        rec.energy.push_back(4.0 * M_PI * 0.5 * (kin + grad + potE));
        double sup = 0.0;
        for (int i = 0; i < n; ++i) sup = std::max(sup, std::fabs(uf[i]));
        rec.sup_norm.push_back(sup);
        rec.local_energy.push_back(kNaN);
        std::array<double, 4> up{};
        for (size_t j = 0; j < 4; ++j) up[j] = uf[pidx[j]];
        rec.u_probe.push_back(up);
        rec.mode_coeff.push_back(probes.spectrum ? inner(uf, probes.spectrum->g0) : kNaN);
        rec.alpha.push_back(kNaN);
        rec.delta.push_back(kNaN);
        rec.ortho_res.push_back(kNaN);
        rec.v_l2.push_back(kNaN);
        rec.v_h1.push_back(kNaN);
        rec.v_h2.push_back(kNaN);
        rec.v_sup.push_back(kNaN);
        rec.v_probe.push_back({kNaN, kNaN, kNaN, kNaN});
        if (cfg.store_snapshots) rec.snapshots.push_back(uf.values);
    };

    bool ended = false;
    for (long step = 1; step < n_steps && !ended; ++step) {
        if (R + (t - s0.t) + cfg.causal_margin >= grid.r_max()) {
            rec.outcome = {Outcome::Tag::undetermined, t, "causality window exhausted"};
            ended = true;
            break;
        }
        w_next[0] = 0.0;
        for (int i = 1; i < n - 1; ++i)
            w_next[static_cast<size_t>(i)] = 2.0 * w_cur[static_cast<size_t>(i)] -
                                             w_prev[static_cast<size_t>(i)] + dt * dt * Lw(w_cur, i);
        w_next[static_cast<size_t>(n - 1)] = w_cur[static_cast<size_t>(n - 1)];
        if (project_unstable) deflate(w_next);
        if (step % cfg.record_stride == 0) record_row(t);
        std::swap(w_prev, w_cur);
        std::swap(w_cur, w_next);
        t += dt;
    }
    if (!ended) rec.outcome = {Outcome::Tag::undetermined, t, "t_max reached"};
    return rec;
}

}  // namespace critwave
