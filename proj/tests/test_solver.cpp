#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "critwave/experiments.hpp"
#include "critwave/ground_state.hpp"
#include "critwave/solver.hpp"

using namespace critwave;

namespace {
RadialGrid fine_grid(double dr, double r_max) {
    int n = static_cast<int>(std::lround(r_max / dr)) + 1;
    if (n % 2 == 0) ++n;
    return RadialGrid(n, dr);
}

RadialField cut_bump(const RadialGrid& g, double amp, double center, double width, double R) {
    RadialField f(g);
    for (int i = 0; i < g.n_points; ++i) {
        const double z = (g.r(i) - center) / width;
        f[i] = amp * std::exp(-z * z) * smooth_cutoff(g.r(i) / R);
    }
    return f;
}

const SpectralData& run_spec() {
    static const SpectralData sd = compute_ground_spectrum(fine_grid(0.02, 70.0));
    return sd;
}
}  // namespace

TEST_CASE("config validation") {
    SolverConfig cfg;
    cfg.cfl = 1.5;
    CHECK_THROWS(cfg.validate());
    cfg.cfl = 0.5;
    cfg.record_stride = 0;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("soliton background is stationary to O(dr^2)") {
    double drift[2];
    int k = 0;
    for (double dr : {0.04, 0.02}) {
        RadialGrid g = fine_grid(dr, 40.0);
        WaveState s;
        s.u = eval_W(SolitonParams{1.0}, g);
        s.ut = RadialField(g);
        SolverConfig cfg;
        cfg.t_max = 3.0;
        cfg.blowup_sup_threshold = 1e4;
        EvolutionProbes probes;
        probes.support_radius = 5.0;
        probes.background_lambda = 1.0;
        TrajectoryRecord traj = evolve(s, cfg, probes);
        // reconstruct the drift from the last record against the background
        double dev = 0.0;
        // probe values hold raw u at {0, R/2, R, 2R}
        const std::array<double, 4> up = traj.u_probe.back();
        const std::array<double, 4> pr = traj.probe_radii;
        for (size_t j = 0; j < 4; ++j)
            dev = std::max(dev, std::fabs(up[j] - ground_state_value(pr[j], 1.0)));
        drift[k++] = dev;
    }
    CHECK(drift[0] / drift[1] >= 3.0);
    CHECK(drift[1] <= 1e-3);
}

TEST_CASE("linear regime matches d'Alembert at second order") {
    // drop the nonlinearity; compare against the exact even-extension formula
    const double amp = 0.5, c0 = 2.0, w0 = 0.8, R = 4.0, T = 5.0;
    auto fbar = [&](double x) {
        x = std::fabs(x);
        const double z = (x - c0) / w0;
        return amp * std::exp(-z * z) * smooth_cutoff(x / R);
    };
    double err[2];
    int k = 0;
    for (double dr : {0.02, 0.01}) {
        RadialGrid g = fine_grid(dr, 30.0);
        WaveState s;
        s.u = cut_bump(g, amp, c0, w0, R);
        s.ut = RadialField(g);
        SolverConfig cfg;
        cfg.drop_nonlinearity = true;
        cfg.t_max = T;
        EvolutionProbes probes;
        probes.support_radius = R;
        // march manually with step_nonlinear to exercise the public stepper
        WaveState cur = s;
        const int nst = static_cast<int>(std::lround(T / cfg.dt(dr)));
        for (int i = 0; i < nst; ++i) cur = step_nonlinear(cur, cfg);
        double e = 0.0;
        for (int i = 1; i < g.n_points; ++i) {
            const double r = g.r(i);
            if (r > 20.0) break;
            const double exact =
                ((r + T) * fbar(r + T) + (r - T) * fbar(r - T)) / (2.0 * r);
            e = std::max(e, std::fabs(cur.u[i] - exact));
        }
        err[k++] = e;
    }
    CHECK(err[0] / err[1] >= 3.0);
    CHECK(err[1] <= 1e-3);
}

TEST_CASE("energy conservation: drift small and falling like dt^4") {
    RadialGrid g = fine_grid(0.02, 30.0);
    WaveState s;
    s.u = cut_bump(g, 0.05, 2.0, 0.8, 4.0);
    s.ut = RadialField(g);
    double drift[2];
    int k = 0;
    for (double cfl : {0.5, 0.25}) {
        SolverConfig cfg;
        cfg.cfl = cfl;
        cfg.t_max = 20.0;
        cfg.record_stride = 50;
        cfg.dwell_time = 1e4;  // keep the run alive for the full window
        EvolutionProbes probes;
        probes.support_radius = 4.0;
        TrajectoryRecord traj = evolve(s, cfg, probes);
        const double e0 = traj.energy.front();
        double worst = 0.0;
        for (double e : traj.energy) worst = std::max(worst, std::fabs(e - e0) / std::fabs(e0));
        drift[k++] = worst;
    }
    CHECK(drift[0] <= 1e-6);
    CHECK(drift[0] / drift[1] >= 8.0);
}

TEST_CASE("finite speed of propagation is exact outside the causal window") {
    RadialGrid g = fine_grid(0.02, 30.0);
    const double R = 4.0;
    WaveState s;
    s.u = cut_bump(g, 0.3, 2.0, 0.8, R);
    s.ut = RadialField(g);
    SolverConfig cfg;
    cfg.t_max = 10.0;
    cfg.record_stride = 100;
    cfg.dwell_time = 1e6;
    cfg.store_snapshots = true;
    EvolutionProbes probes;
    probes.support_radius = R;
    const TrajectoryRecord traj = evolve(s, cfg, probes);
    const std::vector<double>& last = traj.snapshots.back();
    const double t_last = traj.times.back();
    double beyond = 0.0;
    for (int i = 0; i < g.n_points; ++i)
        if (g.r(i) > R + t_last + 2.0 * g.dr)
            beyond = std::max(beyond, std::fabs(last[static_cast<size_t>(i)]));
    CHECK(beyond <= 1e-10);
}

TEST_CASE("evolve classifies the dichotomy and the trivial cases") {
    const SpectralData& sd = run_spec();
    DataFamily zero = make_tangent_data(
        make_family(sd.grid, BumpSpec{0.0, 1.0, 1.0}, BumpSpec{0.0, 1.0, 1.0}, 5.0), sd);
    SolverConfig cfg;
    cfg.t_max = 50.0;
    EvolutionProbes probes;
    probes.support_radius = 5.0;
    probes.background_lambda = 1.0;

    const TrajectoryRecord up = evolve(build_initial_state(zero, 0.05, sd), cfg, probes);
    CHECK(up.outcome.is_blowup());
    const TrajectoryRecord dn = evolve(build_initial_state(zero, -0.05, sd), cfg, probes);
    CHECK(dn.outcome.is_decay());

    // (0,0) in plain mode decays immediately (after the dwell window)
    WaveState null_state;
    null_state.u = RadialField(sd.grid);
    null_state.ut = RadialField(sd.grid);
    EvolutionProbes plain;
    plain.support_radius = 5.0;
    const TrajectoryRecord z = evolve(null_state, cfg, plain);
    CHECK(z.outcome.is_decay());
    CHECK(z.outcome.t <= cfg.dwell_time + 1.0);
}

TEST_CASE("blowup classification is threshold-insensitive (1e3 vs 1e5)") {
    const SpectralData& sd = run_spec();
    DataFamily zero = make_tangent_data(
        make_family(sd.grid, BumpSpec{0.0, 1.0, 1.0}, BumpSpec{0.0, 1.0, 1.0}, 5.0), sd);
    EvolutionProbes probes;
    probes.support_radius = 5.0;
    probes.background_lambda = 1.0;
    double t_star[2];
    int k = 0;
    for (double thr : {1e3, 1e5}) {
        SolverConfig cfg;
        cfg.t_max = 20.0;
        cfg.blowup_sup_threshold = thr;
        const TrajectoryRecord traj = evolve(build_initial_state(zero, 0.05, sd), cfg, probes);
        CHECK(traj.outcome.is_blowup());
        t_star[k++] = traj.outcome.t;
    }
    CHECK(std::fabs(t_star[0] - t_star[1]) <= 0.2);
}

TEST_CASE("free linear evolution: magic-step Huygens and exact causality") {
    RadialGrid g = fine_grid(0.02, 40.0);
    const double R = 4.0;
    WaveState s;
    s.u = cut_bump(g, 1.0, 2.0, 0.5, R);
    s.ut = RadialField(g);
    SolverConfig cfg;
    cfg.cfl = 1.0;
    cfg.t_max = 20.0;
    cfg.record_stride = 4;
    EvolutionProbes probes;
    probes.support_radius = R;
    probes.probe_radii = {0.0, 2.0, 4.0, 8.0};
    const TrajectoryRecord traj =
        evolve_linear(s, SolitonParams{1.0}, cfg, PotentialMode::free, probes);
    double late = 0.0;
    for (size_t i = 0; i < traj.times.size(); ++i)
        if (traj.times[i] > R + 2.0 * g.dr) late = std::max(late, std::fabs(traj.u_probe[i][0]));
    CHECK(late <= 1e-12);  // strong Huygens, exact on the lattice
}

TEST_CASE("linearized evolution: eigenmode grows like cosh(k t)") {
    const SpectralData& sd = run_spec();
    WaveState s;
    s.u = sd.g0;
    s.ut = RadialField(sd.grid);
    SolverConfig cfg;
    cfg.cfl = 0.5;
    cfg.t_max = 5.0;
    cfg.record_stride = 10;
    EvolutionProbes probes;
    probes.spectrum = &sd;
    probes.support_radius = 30.0;
    const TrajectoryRecord traj = evolve_linear(s, SolitonParams{1.0}, cfg,
                                                PotentialMode::with_potential, probes, false);
    double worst = 0.0;
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const double expect = std::cosh(sd.k0 * traj.times[i]);
        worst = std::max(worst, std::fabs(traj.mode_coeff[i] / expect - 1.0));
    }
    CHECK(worst <= 0.01);
}

TEST_CASE("linearized evolution: no unstable excitation from orthogonal data") {
    const SpectralData& sd = run_spec();
    RadialField f = cut_bump(sd.grid, 1.0, 1.5, 0.6, 4.0);
    f = project_off_mode(f, sd.g0);
    const double nf = norms(f).l2;
    WaveState s;
    s.u = RadialField(sd.grid);
    s.ut = f;
    SolverConfig cfg;
    cfg.cfl = 0.5;
    cfg.t_max = 10.0;
    cfg.record_stride = 25;
    EvolutionProbes probes;
    probes.spectrum = &sd;
    probes.support_radius = 4.0;
    const TrajectoryRecord traj = evolve_linear(s, SolitonParams{1.0}, cfg,
                                                PotentialMode::with_potential, probes, true);
    double worst = 0.0;
    for (double c : traj.mode_coeff) worst = std::max(worst, std::fabs(c));
    CHECK(worst <= 1e-3 * nf);
}
