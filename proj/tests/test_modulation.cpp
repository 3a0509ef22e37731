#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "critwave/ground_state.hpp"
#include "critwave/modulation.hpp"
#include "critwave/spectrum.hpp"

using namespace critwave;

namespace {
RadialGrid fine_grid(double dr, double r_max) {
    int n = static_cast<int>(std::lround(r_max / dr)) + 1;
    if (n % 2 == 0) ++n;
    return RadialGrid(n, dr);
}

const SpectralData& spec() {
    static const SpectralData sd = compute_ground_spectrum(fine_grid(0.02, 70.0));
    return sd;
}
}  // namespace

TEST_CASE("decompose: exact soliton at unit and shifted scale") {
    const SpectralData& sd = spec();
    const Modulator mod(sd);

    const ModulationFrame f1 = mod.decompose(eval_W(SolitonParams{1.0}, sd.grid), 1.0);
    CHECK(f1.valid);
    CHECK(f1.alpha == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::fabs(f1.delta) <= 1e-9);
    CHECK(norms(f1.v).sup <= 1e-8);
    CHECK(std::fabs(f1.ortho_residual) <= 1e-9 * (norms(f1.v).l2 + 1.0));

    const ModulationFrame f2 = mod.decompose(eval_W(SolitonParams{1.1}, sd.grid), 1.0);
    CHECK(f2.valid);
    CHECK(f2.alpha == doctest::Approx(1.1).epsilon(1e-7));
    CHECK(norms(f2.v).l2 <= 1e-5);  // interpolation noise only
}

TEST_CASE("decompose: small unstable perturbation against the frozen-frame oracle") {
    const SpectralData& sd = spec();
    const Modulator mod(sd);
    const double eps = 1e-3;
    RadialField u = eval_W(SolitonParams{1.0}, sd.grid);
    for (int i = 0; i < u.size(); ++i) u[i] += eps * sd.g0[i];

    // frozen alpha = 1 oracle: delta = <u - W, g0> = eps exactly
    const double frozen = inner(u - eval_W(SolitonParams{1.0}, sd.grid), sd.g0);
    CHECK(frozen == doctest::Approx(eps).epsilon(1e-12));

    const ModulationFrame fr = mod.decompose(u, 1.0);
    CHECK(fr.valid);
    CHECK(std::fabs(fr.alpha - 1.0) <= 10.0 * eps);
    CHECK(fr.delta == doctest::Approx(eps).epsilon(0.05));
}

TEST_CASE("frame consistency: W_alpha + v reassembles u") {
    const SpectralData& sd = spec();
    const Modulator mod(sd);
    RadialField u = eval_W(SolitonParams{1.07}, sd.grid);
    for (int i = 0; i < u.size(); ++i) u[i] += 2e-3 * sd.g0[i];
    const ModulationFrame fr = mod.decompose(u, 1.0);
    CHECK(fr.valid);
    double worst = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        const double back = ground_state_value(sd.grid.r(i), fr.alpha) + fr.v[i];
        worst = std::max(worst, std::fabs(back - u[i]));
    }
    CHECK(worst <= 1e-14);
}

TEST_CASE("unstable_coordinate: normalization and projector algebra") {
    const SpectralData& sd = spec();
    const Modulator mod(sd);

    ModulationFrame fr;
    fr.valid = true;
    fr.alpha = 1.0;
    fr.v = RadialField(sd.grid);
    CHECK(unstable_coordinate(fr, mod) == 0.0);

    const double c = 0.37;
    const RadialField ga = mod.mode_at(1.0);
    fr.v = c * ga;
    CHECK(unstable_coordinate(fr, mod) == doctest::Approx(c).epsilon(1e-9));

    fr.v = project_off_mode(fr.v, ga);
    CHECK(std::fabs(unstable_coordinate(fr, mod)) <= 1e-10);
}

TEST_CASE("decompose: no root in the bracket means outside the modulation regime") {
    const SpectralData& sd = spec();
    const Modulator mod(sd);
    // soliton at scale 3: the gauge root sits far outside [1/1.5, 1.5]
    const ModulationFrame fr = mod.decompose(eval_W(SolitonParams{3.0}, sd.grid), 1.0);
    CHECK_FALSE(fr.valid);
    // same state with an honest guess resolves fine
    const ModulationFrame ok = mod.decompose(eval_W(SolitonParams{3.0}, sd.grid), 2.8);
    CHECK(ok.valid);
    CHECK(ok.alpha == doctest::Approx(3.0).epsilon(1e-5));
}

TEST_CASE("hyperbolic coordinates isolate pure modes") {
    const double k = 1.1;
    // delta = e^{kt}: n_- vanishes
    {
        const auto hc = hyperbolic_coords(1.0, k, k);
        CHECK(std::fabs(hc.n_minus / hc.n_plus) <= 1e-12);
        CHECK(hc.n_plus == doctest::Approx(std::sqrt(2.0 * k)).epsilon(1e-12));
    }
    // delta = e^{-kt}: n_+ vanishes
    {
        const auto hc = hyperbolic_coords(1.0, -k, k);
        CHECK(std::fabs(hc.n_plus / hc.n_minus) <= 1e-12);
    }
    CHECK_THROWS(hyperbolic_coords(1.0, 0.0, -1.0));

    // series version reproduces the scalar one on a sampled exponential
    std::vector<double> t, d;
    for (int i = 0; i <= 50; ++i) {
        t.push_back(0.02 * i);
        d.push_back(std::exp(k * 0.02 * i));
    }
    const auto hs = hyperbolic_series(t, d, k);
    for (size_t i = 5; i + 5 < hs.size(); ++i)
        CHECK(std::fabs(hs[i].n_minus / hs[i].n_plus) <= 1e-4);  // centered-difference floor
}

TEST_CASE("dist_to_soliton_curve: zeros on both branches, linear growth off them") {
    const SpectralData& sd = spec();
    const RadialGrid& g = sd.grid;
    for (double lam : {0.6, 1.0, 1.8}) {
        WaveState s;
        s.u = eval_W(SolitonParams{lam}, g);
        s.ut = RadialField(g);
        CHECK(dist_to_soliton_curve(s, 1.0) <= 2e-3);
    }
    {
        WaveState s;
        s.u = -1.0 * eval_W(SolitonParams{1.0}, g);
        s.ut = RadialField(g);
        CHECK(dist_to_soliton_curve(s, 1.0) <= 2e-3);
    }
    // (W + eps g0, 0) sits at distance eps ||(g0, 0)||_{H1xL2} (1 + O(eps))
    const double eps = 1e-2;
    WaveState s;
    s.u = eval_W(SolitonParams{1.0}, g);
    for (int i = 0; i < s.u.size(); ++i) s.u[i] += eps * sd.g0[i];
    s.ut = RadialField(g);
    const double d = dist_to_soliton_curve(s, 1.0);
    const double frozen = eps * norms(sd.g0).h1_seminorm;
    CHECK(d <= frozen * 1.02);  // minimized distance lower-bounds the frozen one
    CHECK(d >= frozen * 0.5);
}

TEST_CASE("gauge covariance: dilated state gives alpha' = mu alpha, delta' = delta") {
    const SpectralData& sd = spec();
    const Modulator mod(sd);
    const RadialGrid& g = sd.grid;
    const double eps = 2e-3, mu = 1.15;

    RadialField u(g);
    for (int i = 0; i < g.n_points; ++i)
        u[i] = ground_state_value(g.r(i), 1.0) + eps * sd.g0[i];
    const ModulationFrame base = mod.decompose(u, 1.0);

    // u_mu(r) = sqrt(mu) u(mu r): soliton part lands exactly on W_mu
    RadialField umu(g);
    const RescaledMode gm = rescale_mode(sd, mu);
    for (int i = 0; i < g.n_points; ++i) umu[i] = ground_state_value(g.r(i), mu);
    // dilate the g0 part through the rescaled mode (same L2 mass)
    for (int i = 0; i < g.n_points; ++i) umu[i] += eps * gm.g_alpha[i];

    const ModulationFrame fr = mod.decompose(umu, mu);
    CHECK(fr.valid);
    CHECK(fr.alpha == doctest::Approx(mu * base.alpha).epsilon(5e-3));
    CHECK(fr.delta == doctest::Approx(base.delta).epsilon(5e-2));
}
