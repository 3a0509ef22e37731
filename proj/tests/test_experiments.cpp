#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "critwave/experiments.hpp"
#include "critwave/ground_state.hpp"

using namespace critwave;

namespace {
RadialGrid run_grid() { return RadialGrid(3501, 0.02); }  // r_max = 70

const SpectralData& spec() {
    static const SpectralData sd = compute_ground_spectrum(run_grid());
    return sd;
}

SolverConfig solver_cfg() {
    SolverConfig cfg;
    cfg.t_max = 60.0;
    return cfg;
}
}  // namespace

TEST_CASE("smooth_cutoff shape") {
    CHECK(smooth_cutoff(0.5) == 1.0);
    CHECK(smooth_cutoff(0.8) == 1.0);
    CHECK(smooth_cutoff(1.0) == 0.0);
    CHECK(smooth_cutoff(0.9) > 0.0);
    CHECK(smooth_cutoff(0.9) < 1.0);
}

TEST_CASE("make_tangent_data: projection identities") {
    const SpectralData& sd = spec();
    const RadialGrid g = run_grid();
    const double R = 5.0;

    // (0,0) stays (0,0)
    DataFamily zero = make_tangent_data(make_family(g, BumpSpec{0, 1, 1}, BumpSpec{0, 1, 1}, R), sd);
    CHECK(norms(zero.f2).sup == 0.0);
    CHECK(zero.family_norm == 0.0);

    // f2 = g0 chi_R, f1 = 0: the pure normal component is removed
    DataFamily gchi = make_family(g, BumpSpec{0, 1, 1}, BumpSpec{0, 1, 1}, R);
    for (int i = 0; i < g.n_points; ++i) gchi.f2[i] = sd.g0[i] * smooth_cutoff(g.r(i) / R);
    const DataFamily proj = make_tangent_data(gchi, sd);
    CHECK(norms(proj.f2).l2 <= 0.05 * norms(gchi.f2).l2);

    // random bumps: the post-condition pairing vanishes to 1e-12 scale
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> amp(-0.2, 0.2), center(0.5, 3.0), width(0.4, 1.2);
    for (int trial = 0; trial < 4; ++trial) {
        const DataFamily fam = make_tangent_data(
            make_family(g, BumpSpec{amp(rng), center(rng), width(rng)},
                        BumpSpec{amp(rng), center(rng), width(rng)}, R),
            sd);
        RadialField combo = fam.f2;
        for (int i = 0; i < combo.size(); ++i) combo[i] += sd.k0 * fam.f1[i];
        const double ip = inner(combo, sd.g0);
        const double scale = norms(fam.f1).l2 + norms(fam.f2).l2 + 1.0;
        CHECK(std::fabs(ip) <= 1e-12 * scale);
        // support is exactly inside B(0,R)
        for (int i = g.index_at(R) + 1; i < g.n_points; ++i) {
            CHECK(fam.f1[i] == 0.0);
            CHECK(fam.f2[i] == 0.0);
        }
    }
}

TEST_CASE("build_initial_state: construction identities") {
    const SpectralData& sd = spec();
    const RadialGrid g = run_grid();
    DataFamily zero = make_tangent_data(make_family(g, BumpSpec{0, 1, 1}, BumpSpec{0, 1, 1}, 5.0), sd);

    // c = 0 on the empty family is exactly (W, 0)
    const WaveState s0 = build_initial_state(zero, 0.0, sd);
    const RadialField W = eval_W(SolitonParams{1.0}, g);
    double worst = 0.0;
    for (int i = 0; i < g.n_points; ++i) worst = std::max(worst, std::fabs(s0.u[i] - W[i]));
    CHECK(worst == 0.0);
    CHECK(norms(s0.ut).sup == 0.0);

    // state minus W vanishes beyond R
    const WaveState s1 = build_initial_state(zero, 1e-3, sd);
    for (int i = g.index_at(5.0) + 1; i < g.n_points; ++i)
        CHECK(s1.u[i] - W[i] == 0.0);

    // modulation oracle: delta at t=0 tracks c for the (0,0) family
    const Modulator mod(sd);
    const ModulationFrame fr = mod.decompose(s1.u, 1.0);
    CHECK(fr.valid);
    CHECK(fr.delta == doctest::Approx(1e-3).epsilon(0.05));

    DataFamily raw = make_family(g, BumpSpec{0.01, 1.5, 0.8}, BumpSpec{0, 1, 1}, 5.0);
    CHECK_THROWS(build_initial_state(raw, 0.0, sd));  // unprojected family rejected
}

TEST_CASE("find_threshold: (0,0) family lands near zero with certified bracket") {
    const SpectralData& sd = spec();
    const RadialGrid g = run_grid();
    DataFamily zero = make_tangent_data(make_family(g, BumpSpec{0, 1, 1}, BumpSpec{0, 1, 1}, 5.0), sd);
    const SolverConfig cfg = solver_cfg();

    const auto br = find_bracket(zero, sd, cfg, -2e-4, 2e-4);
    const ThresholdResult thr = find_threshold(zero, sd, br, 1e-10, cfg);
    CHECK(thr.bracket_width <= 1e-10);
    CHECK(thr.lower_outcome.is_decay());
    CHECK(thr.upper_outcome.is_blowup());
    // h(0,0) = 0 up to the O(dr^2) discretization offset of the sampled soliton
    CHECK(std::fabs(thr.h_star) <= g.dr * g.dr);

    // bisection determinism: identical configs give bit-identical results
    const ThresholdResult thr2 = find_threshold(zero, sd, br, 1e-10, cfg);
    CHECK(thr.h_star == thr2.h_star);
    CHECK(thr.bracket_width == thr2.bracket_width);
    CHECK(thr.runs == thr2.runs);
}

TEST_CASE("find_threshold: invalid bracket and undetermined endpoints are reported") {
    const SpectralData& sd = spec();
    const RadialGrid g = run_grid();
    DataFamily zero = make_tangent_data(make_family(g, BumpSpec{0, 1, 1}, BumpSpec{0, 1, 1}, 5.0), sd);
    const SolverConfig cfg = solver_cfg();
    // both endpoints on the blowup side
    CHECK_THROWS_AS(find_threshold(zero, sd, {0.01, 0.05}, 1e-8, cfg), std::runtime_error);
    // t_max far too small to classify the decay side near threshold
    SolverConfig tiny = cfg;
    tiny.t_max = 2.0;
    CHECK_THROWS_AS(find_threshold(zero, sd, {-2e-4, 2e-4}, 1e-8, tiny), UndeterminedError);
}

TEST_CASE("find_bracket expands to a valid (Decay, Blowup) pair") {
    const SpectralData& sd = spec();
    const RadialGrid g = run_grid();
    const SolverConfig cfg = solver_cfg();
    DataFamily fam = make_tangent_data(
        make_family(g, BumpSpec{0.1, 1.5, 0.8}, BumpSpec{0.05, 1.2, 0.7}, 5.0), sd);
    // deliberately inadequate initial window: |h| for this family is ~1e-2
    const auto br = find_bracket(fam, sd, cfg, -1e-3, 1e-3);
    CHECK(br.first < br.second);
    const ThresholdResult thr = find_threshold(fam, sd, br, 1e-8, cfg);
    CHECK(thr.lower_outcome.is_decay());
    CHECK(thr.upper_outcome.is_blowup());
    CHECK(std::fabs(thr.h_star) > 1e-3);  // genuinely displaced from the origin
}

TEST_CASE("ejection: rate, sign, exit-time shift under offset halving") {
    const SpectralData& sd = spec();
    const RadialGrid g = run_grid();
    DataFamily zero = make_tangent_data(make_family(g, BumpSpec{0, 1, 1}, BumpSpec{0, 1, 1}, 5.0), sd);
    const SolverConfig cfg = solver_cfg();
    const auto br = find_bracket(zero, sd, cfg, -2e-4, 2e-4);
    const ThresholdResult thr = find_threshold(zero, sd, br, 1e-12, cfg);
    SolverConfig rcfg = cfg;
    rcfg.t_max = 30.0;
    const TrajectoryRecord ref = run_reference(zero, thr, sd, rcfg, 30.0);

    const EjectionReport e1 = measure_ejection(zero, 1e-6, thr, sd, rcfg, ref);
    CHECK(e1.sign_consistent);
    CHECK(std::fabs(e1.k_fit - e1.alpha_inf * sd.k0) / sd.k0 <= 0.05);
    CHECK(e1.n_ratio_max <= 0.1);

    const EjectionReport e2 = measure_ejection(zero, -1e-6, thr, sd, rcfg, ref);
    CHECK(e2.sign_consistent);  // sign(delta) flips with the offset by construction

    const EjectionReport e3 = measure_ejection(zero, 5e-7, thr, sd, rcfg, ref);
    // halving the offset delays the exit by log(2)/k within 10%
    const double shift = e3.exit_time - e1.exit_time;
    CHECK(shift == doctest::Approx(std::log(2.0) / e1.k_fit).epsilon(0.10));
}

TEST_CASE("scale equivariance of the threshold under soliton dilation") {
    // dilating data, background and unstable direction by mu maps the swept
    // coordinate c to c / mu; the same raw family is bisected around W and
    // around W_mu and the thresholds compared through that scaling
    const SpectralData& sd = spec();
    const RadialGrid g = run_grid();
    const SolverConfig cfg = solver_cfg();

    auto classify_at = [&](double mu, double c) {
        const RescaledMode gm = rescale_mode(sd, mu);
        WaveState s;
        s.u = eval_W(SolitonParams{mu}, g);
        s.ut = RadialField(g);
        for (int i = 0; i < g.n_points; ++i) {
            const double rr = mu * g.r(i);
            const double z = (rr - 1.5) / 0.8;
            s.u[i] += std::sqrt(mu) * 0.01 * std::exp(-z * z) * smooth_cutoff(rr / 5.0);
            s.u[i] += c * gm.g_alpha[i] * smooth_cutoff(rr / 5.0);
        }
        EvolutionProbes probes;
        probes.support_radius = 5.0 / mu;
        probes.background_lambda = mu;
        return evolve(s, cfg, probes).outcome;
    };
    auto bisect_at = [&](double mu) {
        double lo = -0.06, hi = 0.06;
        REQUIRE(classify_at(mu, lo).is_decay());
        REQUIRE(classify_at(mu, hi).is_blowup());
        while (hi - lo > 1e-9) {
            const double mid = 0.5 * (lo + hi);
            const Outcome om = classify_at(mu, mid);
            if (om.is_blowup())
                hi = mid;
            else if (om.is_decay())
                lo = mid;
            else
                FAIL("undetermined in dilation bisection");
        }
        return 0.5 * (lo + hi);
    };
    const double h1 = bisect_at(1.0);
    const double h_mu = bisect_at(1.25);
    CHECK(h_mu == doctest::Approx(h1 / 1.25).epsilon(0.10));
}
