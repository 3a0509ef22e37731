#include "critwave/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

#include "critwave/diagnostics.hpp"

namespace critwave {

double smooth_cutoff(double x) {
    if (x <= 0.8) return 1.0;
    if (x >= 1.0) return 0.0;
    const double y = (x - 0.8) / 0.2;
    const double a = std::exp(-1.0 / (1.0 - y));
    const double b = std::exp(-1.0 / y);
    return a / (a + b);
}

namespace {

RadialField realize_bump(const RadialGrid& grid, const BumpSpec& spec, double R) {
    RadialField f(grid);
    if (spec.amplitude == 0.0) return f;
    for (int i = 0; i < grid.n_points; ++i) {
        const double r = grid.r(i);
        const double z = (r - spec.center) / spec.width;
        f[i] = spec.amplitude * std::exp(-z * z) * smooth_cutoff(r / R);
    }
    return f;
}

RadialField cutoff_mode(const SpectralData& sd, double R) {
    RadialField g = sd.g0;
    for (int i = 0; i < g.size(); ++i) g[i] *= smooth_cutoff(g.grid.r(i) / R);
    return g;
}

double surrogate_norm(const RadialField& f) {
    const FieldNorms n = norms(f);
    return std::sqrt(n.l2 * n.l2 + n.h1_seminorm * n.h1_seminorm + n.h2 * n.h2);
}

double pair_norm(const RadialField& f1, const RadialField& f2) {
    const double a = surrogate_norm(f1), b = surrogate_norm(f2);
    return std::sqrt(a * a + b * b);
}

}  // namespace

DataFamily make_family(const RadialGrid& grid, const BumpSpec& f1_shape, const BumpSpec& f2_shape,
                       double support_radius) {
    if (!(support_radius > 1.0)) throw std::invalid_argument("family: support radius must exceed 1");
    if (support_radius >= grid.r_max())
        throw std::invalid_argument("family: support radius exceeds the grid");
    DataFamily fam;
    fam.f1_shape = f1_shape;
    fam.f2_shape = f2_shape;
    fam.support_radius = support_radius;
    fam.f1 = realize_bump(grid, f1_shape, support_radius);
    fam.f2 = realize_bump(grid, f2_shape, support_radius);
    fam.projected = false;
    fam.family_norm = pair_norm(fam.f1, fam.f2);
    return fam;
}

DataFamily make_tangent_data(const DataFamily& family, const SpectralData& sd) {
    DataFamily out = family;
    const RadialField gchi = cutoff_mode(sd, family.support_radius);
    const double den = inner(gchi, sd.g0);
    if (std::fabs(den) < 0.1)
        throw std::runtime_error("make_tangent_data: <g0 chi_R, g0> degenerately small; R too small");
    RadialField combo = out.f2;
    for (int i = 0; i < combo.size(); ++i) combo[i] += sd.k0 * out.f1[i];
    const double ip = inner(combo, sd.g0);
    for (int i = 0; i < out.f2.size(); ++i) out.f2[i] -= ip * gchi[i] / den;
    out.projected = true;
    out.family_norm = pair_norm(out.f1, out.f2);
    return out;
}

DataFamily scale_family(const RadialGrid& grid, const DataFamily& family, double eps,
                        const SpectralData& sd) {
    BumpSpec s1 = family.f1_shape, s2 = family.f2_shape;
    s1.amplitude *= eps;
    s2.amplitude *= eps;
    return make_tangent_data(make_family(grid, s1, s2, family.support_radius), sd);
}

WaveState build_initial_state(const DataFamily& family, double c, const SpectralData& sd) {
    if (!family.projected) throw std::invalid_argument("build_initial_state: family not projected");
    const RadialGrid& grid = sd.grid;
    if (!(family.f1.grid == grid)) throw std::invalid_argument("build_initial_state: grid mismatch");
    const RadialField gchi = cutoff_mode(sd, family.support_radius);
    WaveState s;
    s.t = 0.0;
    s.u = RadialField(grid);
    for (int i = 0; i < grid.n_points; ++i)
        s.u[i] = ground_state_value(grid.r(i), 1.0) + family.f1[i] + c * gchi[i];
    s.ut = family.f2;
    return s;
}

namespace {

Outcome classify(const DataFamily& family, double c, const SpectralData& sd, const SolverConfig& cfg) {
    EvolutionProbes probes;
    probes.spectrum = nullptr;
    probes.support_radius = family.support_radius;
    probes.background_lambda = 1.0;
    const WaveState s0 = build_initial_state(family, c, sd);
    return evolve(s0, cfg, probes).outcome;
}

}  // namespace

std::pair<double, double> find_bracket(const DataFamily& family, const SpectralData& sd,
                                       const SolverConfig& cfg, double c_lo, double c_hi,
                                       int max_expand) {
    if (!(c_lo < c_hi)) throw std::invalid_argument("find_bracket: c_lo must be below c_hi");
    // the two endpoint evolutions are independent; run them concurrently
    auto lo_f = std::async(std::launch::async, classify, std::cref(family), c_lo, std::cref(sd), std::cref(cfg));
    auto hi_f = std::async(std::launch::async, classify, std::cref(family), c_hi, std::cref(sd), std::cref(cfg));
    Outcome lo = lo_f.get(), hi = hi_f.get();
    for (int it = 0; it < max_expand; ++it) {
        const double width = c_hi - c_lo;
        if (lo.is_decay() && hi.is_blowup()) return {c_lo, c_hi};
        if (!lo.is_decay()) {
            c_lo -= width;
            lo = classify(family, c_lo, sd, cfg);
        }
        if (!hi.is_blowup()) {
            c_hi += width;
            hi = classify(family, c_hi, sd, cfg);
        }
    }
    throw std::runtime_error("find_bracket: no (Decay, Blowup) bracket after expansion");
}

ThresholdResult find_threshold(const DataFamily& family, const SpectralData& sd,
                               std::pair<double, double> bracket, double tol,
                               const SolverConfig& cfg) {
    double lo = bracket.first, hi = bracket.second;
    if (!(lo < hi) || !(tol > 0.0)) throw std::invalid_argument("find_threshold: bad bracket/tol");
    ThresholdResult out;
    out.family_norm = family.family_norm;

    Outcome olo = classify(family, lo, sd, cfg);
    Outcome ohi = classify(family, hi, sd, cfg);
    out.runs = 2;
    if (!olo.is_decay() || !ohi.is_blowup()) {
        if (olo.tag == Outcome::Tag::undetermined || ohi.tag == Outcome::Tag::undetermined)
            throw UndeterminedError("find_threshold: endpoint Undetermined at t = " +
                                    std::to_string(olo.is_decay() ? ohi.t : olo.t) +
                                    " (t_max insufficient)");
        throw std::runtime_error("find_threshold: bracket invalid (endpoints misclassified)");
    }

    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
        const Outcome om = classify(family, mid, sd, cfg);
        ++out.runs;
        if (om.is_blowup()) {
            hi = mid;
            ohi = om;
        } else if (om.is_decay()) {
            lo = mid;
            olo = om;
        } else {
            throw UndeterminedError("find_threshold: Undetermined at c = " + std::to_string(mid) +
                                    ", t reached " + std::to_string(om.t) + " (t_max insufficient)");
        }
    }
    // re-certify the final bracket endpoints
    olo = classify(family, lo, sd, cfg);
    ohi = classify(family, hi, sd, cfg);
    out.runs += 2;
    if (!olo.is_decay() || !ohi.is_blowup())
        throw std::runtime_error("find_threshold: final bracket failed re-certification");
    out.c_lo = lo;
    out.c_hi = hi;
    out.h_star = 0.5 * (lo + hi);
    out.bracket_width = hi - lo;
    out.lower_outcome = olo;
    out.upper_outcome = ohi;
    return out;
}

TrajectoryRecord run_reference(const DataFamily& family, const ThresholdResult& thr,
                               const SpectralData& sd, const SolverConfig& cfg, double t_max,
                               bool snapshots) {
    SolverConfig rcfg = cfg;
    rcfg.t_max = t_max;
    rcfg.store_snapshots = snapshots;
    EvolutionProbes probes;
    probes.spectrum = &sd;
    probes.support_radius = family.support_radius;
    probes.background_lambda = 1.0;
    const double R = family.support_radius;
    probes.probe_radii = {0.0, 0.5 * R, R, 2.0 * R};
    return evolve(build_initial_state(family, thr.h_star, sd), rcfg, probes);
}

namespace {

struct Window {
    size_t lo = 0, hi = 0;  // [lo, hi) record indices
    bool ok = false;
};

// Contiguous fit window: walk forward to the first sample past epsilon0 (or
// frame breakdown), then back off to where |delta_rel| >= the floor guard.
Window ejection_window(const std::vector<double>& drel, const std::vector<double>& dref,
                       const std::vector<double>& alpha_pert, double c_offset,
                       const EjectionConfig& ecfg) {
    const size_t n = drel.size();
    size_t hi = n;
    for (size_t i = 0; i < n; ++i) {
        const bool broken = !std::isfinite(drel[i]) || !std::isfinite(alpha_pert[i]) ||
                            std::fabs(alpha_pert[i] - 1.0) > 0.5;
        if (broken || std::fabs(drel[i]) >= ecfg.epsilon0) {
            hi = i;
            break;
        }
    }
    if (hi < 3) return {};
    double floor = 0.0;
    for (size_t i = 0; i < hi; ++i)
        if (std::isfinite(dref[i])) floor = std::max(floor, std::fabs(dref[i]));
    const double lo_thr = std::max(10.0 * std::fabs(c_offset), ecfg.floor_guard * floor);
    size_t lo = hi - 1;
    while (lo > 0 && std::fabs(drel[lo - 1]) >= lo_thr) --lo;
    if (hi - lo < 3) return {};
    return {lo, hi, true};
}

}  // namespace

EjectionReport measure_ejection(const DataFamily& family, double c_offset, const ThresholdResult& thr,
                                const SpectralData& sd, const SolverConfig& cfg,
                                const TrajectoryRecord& reference, const EjectionConfig& ecfg) {
    if (c_offset == 0.0) throw std::invalid_argument("measure_ejection: c_offset must be nonzero");
    EjectionReport rep;
    rep.c_offset = c_offset;

    SolverConfig rcfg = cfg;
    EvolutionProbes probes;
    probes.spectrum = &sd;
    probes.support_radius = family.support_radius;
    probes.background_lambda = 1.0;
    const double R = family.support_radius;
    probes.probe_radii = {0.0, 0.5 * R, R, 2.0 * R};
    const TrajectoryRecord traj =
        evolve(build_initial_state(family, thr.h_star + c_offset, sd), rcfg, probes);

    const size_t n = std::min(traj.times.size(), reference.times.size());
    std::vector<double> t(n), drel(n), draw(n);
    for (size_t i = 0; i < n; ++i) {
        t[i] = traj.times[i];
        draw[i] = traj.delta[i];
        drel[i] = traj.delta[i] - reference.delta[i];
    }
    const Window win = ejection_window(drel, reference.delta, traj.alpha, c_offset, ecfg);
    const double min_window = ecfg.min_window > 0.0 ? ecfg.min_window : 3.0 / sd.k0;
    if (!win.ok || t[win.hi - 1] - t[win.lo] < min_window)
        throw std::runtime_error(
            "measure_ejection: insufficient linear regime; lower |c_offset| or raise t_max");

    std::vector<double> xs, ys;
    rep.sign_consistent = true;
    for (size_t i = win.lo; i < win.hi; ++i) {
        xs.push_back(t[i]);
        ys.push_back(std::log(std::fabs(drel[i])));
        if (drel[i] * c_offset <= 0.0) rep.sign_consistent = false;
    }
    rep.k_fit = fit_slope(xs, ys);
    rep.window_t0 = t[win.lo];
    rep.window_t1 = t[win.hi - 1];

    // alpha_inf: late-window dilation of the on-manifold reference
    {
        std::vector<double> tail;
        for (size_t i = (win.hi > 20 ? win.hi - 20 : 0); i < win.hi; ++i)
            if (std::isfinite(reference.alpha[i])) tail.push_back(reference.alpha[i]);
        if (!tail.empty()) {
            std::sort(tail.begin(), tail.end());
            rep.alpha_inf = tail[tail.size() / 2];
        }
    }

    // exit time: first |delta_rel| >= epsilon0
    rep.exit_time = t[win.hi - 1];
    for (size_t i = 0; i < n; ++i)
        if (std::isfinite(drel[i]) && std::fabs(drel[i]) >= ecfg.epsilon0) {
            rep.exit_time = t[i];
            break;
        }

    // n_-/n_+ on the window
    {
        std::vector<double> wt(t.begin() + static_cast<long>(win.lo), t.begin() + static_cast<long>(win.hi));
        std::vector<double> wd(drel.begin() + static_cast<long>(win.lo), drel.begin() + static_cast<long>(win.hi));
        const auto hc = hyperbolic_series(wt, wd, rep.alpha_inf * sd.k0);
        for (size_t i = 1; i + 1 < hc.size(); ++i)
            rep.n_ratio_max = std::max(rep.n_ratio_max, std::fabs(hc[i].n_minus / hc[i].n_plus));
    }

    rep.times = std::move(t);
    rep.delta_rel = std::move(drel);
    rep.delta_raw = std::move(draw);
    return rep;
}

BootstrapReport bootstrap_check(const DataFamily& family, double c_offset, const ThresholdResult& thr,
                                const SpectralData& sd, const SolverConfig& cfg,
                                const TrajectoryRecord& reference, const EjectionConfig& ecfg) {
    if (reference.snapshots.empty())
        throw std::invalid_argument("bootstrap_check: reference must carry snapshots");
    BootstrapReport rep;

    SolverConfig rcfg = cfg;
    rcfg.store_snapshots = true;
    EvolutionProbes probes;
    probes.spectrum = &sd;
    probes.support_radius = family.support_radius;
    probes.background_lambda = 1.0;
    const TrajectoryRecord traj =
        evolve(build_initial_state(family, thr.h_star + c_offset, sd), rcfg, probes);

    const RadialGrid& grid = sd.grid;
    const Modulator mod(sd);
    const size_t n = std::min(traj.snapshots.size(), reference.snapshots.size());

    // alpha_inf for the gauge-mismatch report
    double alpha_inf = 1.0;
    {
        std::vector<double> tail;
        for (size_t i = n > 20 ? n - 20 : 0; i < n; ++i)
            if (std::isfinite(reference.alpha[i])) tail.push_back(reference.alpha[i]);
        if (!tail.empty()) {
            std::sort(tail.begin(), tail.end());
            alpha_inf = tail[tail.size() / 2];
        }
    }
    const RadialField g_inf = mod.mode_at(alpha_inf);

    std::vector<double> dts, deta;
    for (size_t i = 0; i < n; ++i) {
        if (!std::isfinite(traj.alpha[i]) || !std::isfinite(reference.alpha[i])) break;
        RadialField eta(grid);
        for (int j = 0; j < grid.n_points; ++j)
            eta[j] = traj.snapshots[i][static_cast<size_t>(j)] -
                     reference.snapshots[i][static_cast<size_t>(j)];
        const RadialField ga = mod.mode_at(traj.alpha[i]);
        const double d = inner(eta, ga);
        const double d_inf = inner(eta, g_inf);
        if (std::fabs(d) > 1e-14)
            rep.gauge_mismatch_max = std::max(rep.gauge_mismatch_max, std::fabs(d - d_inf) / std::fabs(d));
        dts.push_back(traj.times[i]);
        deta.push_back(d);
        const double lo_thr = 10.0 * std::fabs(c_offset);
        if (std::fabs(d) < lo_thr || std::fabs(d) > ecfg.epsilon0) continue;
        const RadialField eta_t = project_off_mode(eta, ga);
        const FieldNorms nn = norms(eta_t);
        const double rho = (nn.l2 + nn.h1_seminorm + nn.h2) / std::fabs(d);
        rep.times.push_back(traj.times[i]);
        rep.rho.push_back(rho);
        rep.delta_eta.push_back(d);
        if (rep.rho.size() == 1) rep.window_t0 = traj.times[i];
        rep.window_t1 = traj.times[i];
        rep.rho_sup = std::max(rep.rho_sup, rho);
        if (std::fabs(d) > ecfg.epsilon0) break;
    }
    if (rep.rho.size() < 3)
        throw std::runtime_error("bootstrap_check: ejection window too short; rerun threshold tighter");

    // n_-/n_+ of the eta coordinate on the window
    {
        std::vector<double> wt, wd;
        for (size_t i = 0; i < dts.size(); ++i) {
            if (dts[i] < rep.window_t0 || dts[i] > rep.window_t1) continue;
            wt.push_back(dts[i]);
            wd.push_back(deta[i]);
        }
        if (wt.size() >= 3) {
            const auto hc = hyperbolic_series(wt, wd, alpha_inf * sd.k0);
            for (size_t i = 1; i + 1 < hc.size(); ++i)
                rep.n_ratio_max = std::max(rep.n_ratio_max, std::fabs(hc[i].n_minus / hc[i].n_plus));
        }
    }
    return rep;
}

HScalingReport sweep_h_scaling(const RadialGrid& grid, const DataFamily& base,
                               const std::vector<double>& epsilons, const SpectralData& sd,
                               const SolverConfig& cfg, double bisect_tol,
                               std::optional<std::pair<DataFamily, DataFamily>> lipschitz_pair) {
    HScalingReport rep;

    // baseline: the (0,0) family isolates the pure discretization offset
    DataFamily zero = make_tangent_data(make_family(grid, BumpSpec{0.0, 1.0, 1.0},
                                                    BumpSpec{0.0, 1.0, 1.0}, base.support_radius),
                                        sd);
    {
        const auto br = find_bracket(zero, sd, cfg, -1e-3, 1e-3);
        rep.baseline_h = find_threshold(zero, sd, br, bisect_tol, cfg).h_star;
    }

    std::vector<double> lx, ly;
    for (double eps : epsilons) {
        const DataFamily fam = scale_family(grid, base, eps, sd);
        const double guess = 2.0 * std::fabs(rep.baseline_h) + 1e-3;
        const auto br = find_bracket(fam, sd, cfg, -guess, guess);
        const ThresholdResult thr = find_threshold(fam, sd, br, bisect_tol, cfg);
        HScalingPoint pt;
        pt.eps = eps;
        pt.h_star = thr.h_star;
        pt.h_rel = thr.h_star - rep.baseline_h;
        pt.family_norm = thr.family_norm;
        pt.bracket_width = thr.bracket_width;
        rep.points.push_back(pt);
        if (pt.h_rel != 0.0) {
            lx.push_back(std::log(eps));
            ly.push_back(std::log(std::fabs(pt.h_rel)));
        }
    }
    if (lx.size() >= 2) rep.slope = fit_slope(lx, ly);

    if (lipschitz_pair) {
        const DataFamily& A = lipschitz_pair->first;
        const DataFamily& B = lipschitz_pair->second;
        const auto brA = find_bracket(A, sd, cfg, -0.1, 0.1);
        const auto brB = find_bracket(B, sd, cfg, -0.1, 0.1);
        const double hA = find_threshold(A, sd, brA, bisect_tol, cfg).h_star;
        const double hB = find_threshold(B, sd, brB, bisect_tol, cfg).h_star;
        RadialField d1 = A.f1 - B.f1;
        RadialField d2 = A.f2 - B.f2;
        const double dn = pair_norm(d1, d2);
        rep.lipschitz = dn > 0.0 ? std::fabs(hA - hB) / dn : 0.0;
    }
    return rep;
}

}  // namespace critwave
