#include "critwave/outputs.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "critwave/diagnostics.hpp"
#include "critwave/experiments.hpp"
#include "critwave/modulation.hpp"
#include "critwave/svg.hpp"
#include "critwave/version.hpp"

namespace critwave {

namespace fs = std::filesystem;

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    return os;
}

RadialGrid run_grid(const RunConfig& cfg) { return RadialGrid(cfg.grid_n_points, cfg.grid_dr); }

RadialGrid spectrum_grid(const RunConfig& cfg) {
    int n = static_cast<int>(std::lround(cfg.spectrum_r_max / cfg.spectrum_dr)) + 1;
    if (n % 2 == 0) ++n;  // odd node count keeps composite Simpson exact
    return RadialGrid(n, cfg.spectrum_dr);
}

SolverConfig solver_config(const RunConfig& cfg) {
    SolverConfig s;
    s.cfl = cfg.solver_cfl;
    s.t_max = cfg.solver_t_max;
    s.blowup_sup_threshold = cfg.solver_blowup_sup_threshold;
    s.decay_local_energy_threshold = cfg.solver_decay_local_energy_threshold;
    s.decay_sup_threshold = cfg.solver_decay_sup_threshold;
    s.dwell_time = cfg.solver_dwell_time;
    s.causal_margin = cfg.solver_causal_margin;
    s.record_stride = cfg.solver_record_stride;
    s.store_snapshots = cfg.solver_store_snapshots;
    s.drop_nonlinearity = cfg.solver_drop_nonlinearity;
    return s;
}

DataFamily family_from_config(const RunConfig& cfg, const RadialGrid& grid, const SpectralData& sd) {
    BumpSpec f1{cfg.family_f1_amplitude, cfg.family_f1_center, cfg.family_f1_width};
    BumpSpec f2{cfg.family_f2_amplitude, cfg.family_f2_center, cfg.family_f2_width};
    DataFamily fam = make_tangent_data(make_family(grid, f1, f2, cfg.family_support_radius), sd);
    if (cfg.family_norm_target > 0.0 && fam.family_norm > 0.0) {
        const double scale = cfg.family_norm_target / fam.family_norm;
        f1.amplitude *= scale;
        f2.amplitude *= scale;
        fam = make_tangent_data(make_family(grid, f1, f2, cfg.family_support_radius), sd);
    }
    return fam;
}

ThresholdResult bisect_from_config(const DataFamily& fam, const SpectralData& sd,
                                   const RunConfig& cfg, const SolverConfig& scfg, double tol) {
    std::pair<double, double> br{cfg.threshold_c_lo, cfg.threshold_c_hi};
    if (cfg.threshold_auto_bracket) br = find_bracket(fam, sd, scfg, br.first, br.second);
    return find_threshold(fam, sd, br, tol, scfg);
}

void write_spectrum_csv(const std::string& path, const SpectralData& sd) {
    auto os = open_out(path);
    os << "k0,k0_shooting,k0_matrix,residual_eig,residual_res,negative_count,n_points,dr\n";
    os << format_real(sd.k0) << ',' << format_real(sd.k0_shooting) << ','
       << format_real(sd.k0_matrix) << ',' << format_real(sd.residual_eig) << ','
       << format_real(sd.residual_res) << ',' << sd.negative_count << ',' << sd.grid.n_points
       << ',' << format_real(sd.grid.dr) << "\n";
}

void write_threshold_csv(const std::string& path, const ThresholdResult& thr) {
    auto os = open_out(path);
    os << "h_star,bracket_width,runs,lower_outcome,upper_outcome,family_norm,c_lo,c_hi\n";
    os << format_real(thr.h_star) << ',' << format_real(thr.bracket_width) << ',' << thr.runs
       << ',' << Outcome::name(thr.lower_outcome.tag) << ',' << Outcome::name(thr.upper_outcome.tag)
       << ',' << format_real(thr.family_norm) << ',' << format_real(thr.c_lo) << ','
       << format_real(thr.c_hi) << "\n";
}

}  // namespace

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& traj) {
    auto os = open_out(path);
    os << "t,energy,sup_norm,alpha,delta,v_l2,v_h1,v_h2,outcome_flag\n";
    const char* flag = Outcome::name(traj.outcome.tag);
    for (size_t i = 0; i < traj.times.size(); ++i) {
        os << format_real(traj.times[i]) << ',' << format_real(traj.energy[i]) << ','
           << format_real(traj.sup_norm[i]) << ',' << format_real(traj.alpha[i]) << ','
           << format_real(traj.delta[i]) << ',' << format_real(traj.v_l2[i]) << ','
           << format_real(traj.v_h1[i]) << ',' << format_real(traj.v_h2[i]) << ',' << flag << "\n";
    }
}

void write_manifest(const std::string& path, const RunConfig& cfg, const SpectralData& sd) {
    auto os = open_out(path);
    os << "critwave " << version() << "\n";
    os << "spectral_certificate k0 = " << format_real(sd.k0)
       << " residual_eig = " << format_real(sd.residual_eig)
       << " residual_res = " << format_real(sd.residual_res)
       << " negative_count = " << sd.negative_count << "\n";
    os << "resolved configuration:\n" << serialize_config(cfg);
}

namespace {

int run_spectrum(const RunConfig& cfg, const std::string& out) {
    const RadialGrid grid = spectrum_grid(cfg);
    const SpectralData sd = compute_ground_spectrum(grid, EigenMethod::matrix);
    write_spectrum_csv(out + "/spectrum.csv", sd);
    write_field_csv(out + "/g0.csv", sd.g0);
    write_field_csv(out + "/psi.csv", sd.psi);
    {
        std::vector<double> r(static_cast<size_t>(grid.n_points)), g(r.size()), p(r.size());
        for (int i = 0; i < grid.n_points; ++i) {
            r[static_cast<size_t>(i)] = grid.r(i);
            g[static_cast<size_t>(i)] = sd.g0[i];
            p[static_cast<size_t>(i)] = sd.psi[i];
        }
        SvgPlot plot("unstable mode and resonance", "r", "value");
        plot.add_series("g0", r, g);
        plot.add_series("Lambda W", r, p);
        plot.write(out + "/modes.svg");
    }
    write_manifest(out + "/manifest.txt", cfg, sd);
    return exit_ok;
}

int run_evolve(const RunConfig& cfg, const std::string& out) {
    const RadialGrid grid = run_grid(cfg);
    const SpectralData sd = compute_ground_spectrum(grid, EigenMethod::matrix);
    const DataFamily fam = family_from_config(cfg, grid, sd);
    const SolverConfig scfg = solver_config(cfg);
    EvolutionProbes probes;
    probes.spectrum = &sd;
    probes.support_radius = fam.support_radius;
    probes.background_lambda = 1.0;
    const double R = fam.support_radius;
    probes.probe_radii = {0.0, 0.5 * R, R, 2.0 * R};
    const TrajectoryRecord traj = evolve(build_initial_state(fam, cfg.evolve_delta0, sd), scfg, probes);
    write_trajectory_csv(out + "/trajectory.csv", traj);
    {
        std::vector<double> t, d;
        for (size_t i = 0; i < traj.times.size(); ++i)
            if (std::isfinite(traj.delta[i]) && traj.delta[i] != 0.0) {
                t.push_back(traj.times[i]);
                d.push_back(std::fabs(traj.delta[i]));
            }
        SvgPlot plot("unstable coordinate", "t", "|delta|", false, true);
        plot.add_series("|delta(t)|", t, d);
        plot.write(out + "/delta_log.svg");
    }
    write_manifest(out + "/manifest.txt", cfg, sd);
    return traj.outcome.tag == Outcome::Tag::undetermined ? exit_undetermined : exit_ok;
}

int run_threshold(const RunConfig& cfg, const std::string& out) {
    const RadialGrid grid = run_grid(cfg);
    const SpectralData sd = compute_ground_spectrum(grid, EigenMethod::matrix);
    const DataFamily fam = family_from_config(cfg, grid, sd);
    const SolverConfig scfg = solver_config(cfg);
    const ThresholdResult thr = bisect_from_config(fam, sd, cfg, scfg, cfg.threshold_tol);
    write_threshold_csv(out + "/threshold.csv", thr);
    const TrajectoryRecord ref = run_reference(fam, thr, sd, scfg, scfg.t_max * 0.5);
    write_trajectory_csv(out + "/reference_trajectory.csv", ref);
    {
        std::vector<double> t, d;
        for (size_t i = 0; i < ref.times.size(); ++i)
            if (std::isfinite(ref.delta[i]) && ref.delta[i] != 0.0) {
                t.push_back(ref.times[i]);
                d.push_back(std::fabs(ref.delta[i]));
            }
        SvgPlot plot("bisected reference trajectory", "t", "|delta|", false, true);
        plot.add_series("|delta(t)|", t, d);
        plot.write(out + "/delta_log.svg");
    }
    write_manifest(out + "/manifest.txt", cfg, sd);
    return exit_ok;
}

int run_ejection(const RunConfig& cfg, const std::string& out) {
    const RadialGrid grid = run_grid(cfg);
    const SpectralData sd = compute_ground_spectrum(grid, EigenMethod::matrix);
    const DataFamily fam = family_from_config(cfg, grid, sd);
    const SolverConfig scfg = solver_config(cfg);
    const ThresholdResult thr = bisect_from_config(fam, sd, cfg, scfg, cfg.ejection_threshold_tol);
    const TrajectoryRecord ref = run_reference(fam, thr, sd, scfg, scfg.t_max);
    EjectionConfig ecfg;
    ecfg.epsilon0 = cfg.ejection_epsilon0;
    ecfg.floor_guard = cfg.ejection_floor_guard;

    auto os = open_out(out + "/ejection.csv");
    os << "c_offset,k_fit,alpha_inf,window_t0,window_t1,exit_time,sign_consistent,n_ratio_max\n";
    SvgPlot plot("ejection of the unstable coordinate", "t", "|delta_rel|", false, true);
    for (double off : cfg.ejection_c_offsets) {
        const EjectionReport rep = measure_ejection(fam, off, thr, sd, scfg, ref, ecfg);
        os << format_real(rep.c_offset) << ',' << format_real(rep.k_fit) << ','
           << format_real(rep.alpha_inf) << ',' << format_real(rep.window_t0) << ','
           << format_real(rep.window_t1) << ',' << format_real(rep.exit_time) << ','
           << (rep.sign_consistent ? "true" : "false") << ',' << format_real(rep.n_ratio_max)
           << "\n";
        std::vector<double> t, d;
        for (size_t i = 0; i < rep.times.size(); ++i)
            if (std::isfinite(rep.delta_rel[i]) && rep.delta_rel[i] != 0.0) {
                t.push_back(rep.times[i]);
                d.push_back(std::fabs(rep.delta_rel[i]));
            }
        plot.add_series("offset " + format_real(off), t, d);
    }
    plot.write(out + "/delta_log.svg");
    write_manifest(out + "/manifest.txt", cfg, sd);
    return exit_ok;
}

int run_bootstrap(const RunConfig& cfg, const std::string& out) {
    const RadialGrid grid = run_grid(cfg);
    const SpectralData sd = compute_ground_spectrum(grid, EigenMethod::matrix);
    const DataFamily fam = family_from_config(cfg, grid, sd);
    const SolverConfig scfg = solver_config(cfg);
    const ThresholdResult thr = bisect_from_config(fam, sd, cfg, scfg, cfg.bootstrap_threshold_tol);
    const TrajectoryRecord ref = run_reference(fam, thr, sd, scfg, scfg.t_max, /*snapshots=*/true);
    const BootstrapReport rep = bootstrap_check(fam, cfg.bootstrap_c_offset, thr, sd, scfg, ref);

    auto os = open_out(out + "/bootstrap.csv");
    os << "t,rho,delta_eta\n";
    for (size_t i = 0; i < rep.times.size(); ++i)
        os << format_real(rep.times[i]) << ',' << format_real(rep.rho[i]) << ','
           << format_real(rep.delta_eta[i]) << "\n";
    auto os2 = open_out(out + "/bootstrap_summary.csv");
    os2 << "rho_sup,n_ratio_max,window_t0,window_t1,gauge_mismatch_max,rho_tol,n_ratio_tol\n";
    os2 << format_real(rep.rho_sup) << ',' << format_real(rep.n_ratio_max) << ','
        << format_real(rep.window_t0) << ',' << format_real(rep.window_t1) << ','
        << format_real(rep.gauge_mismatch_max) << ',' << format_real(cfg.bootstrap_rho_tol) << ','
        << format_real(cfg.bootstrap_n_ratio_tol) << "\n";
    {
        SvgPlot plot("bootstrap hierarchy", "t", "rho");
        plot.add_series("rho(t)", rep.times, rep.rho);
        plot.write(out + "/rho.svg");
    }
    write_manifest(out + "/manifest.txt", cfg, sd);
    return exit_ok;
}

int run_hscaling(const RunConfig& cfg, const std::string& out) {
    const RadialGrid grid = run_grid(cfg);
    const SpectralData sd = compute_ground_spectrum(grid, EigenMethod::matrix);
    const DataFamily base = family_from_config(cfg, grid, sd);
    const SolverConfig scfg = solver_config(cfg);

    std::optional<std::pair<DataFamily, DataFamily>> lippair;
    if (cfg.hscaling_lipschitz_perturbation > 0.0) {
        BumpSpec p1{cfg.family_f1_amplitude * (1.0 + cfg.hscaling_lipschitz_perturbation),
                    cfg.family_f1_center, cfg.family_f1_width};
        BumpSpec p2{cfg.family_f2_amplitude, cfg.family_f2_center, cfg.family_f2_width};
        lippair = std::make_pair(
            base, make_tangent_data(make_family(grid, p1, p2, cfg.family_support_radius), sd));
    }
    const HScalingReport rep = sweep_h_scaling(grid, base, cfg.hscaling_epsilons, sd, scfg,
                                               cfg.hscaling_tol, lippair);
    auto os = open_out(out + "/hscaling.csv");
    os << "eps,h_star,h_rel,family_norm,bracket_width\n";
    for (const auto& p : rep.points)
        os << format_real(p.eps) << ',' << format_real(p.h_star) << ',' << format_real(p.h_rel)
           << ',' << format_real(p.family_norm) << ',' << format_real(p.bracket_width) << "\n";
    auto os2 = open_out(out + "/hscaling_summary.csv");
    os2 << "slope,baseline_h,lipschitz\n";
    os2 << format_real(rep.slope) << ',' << format_real(rep.baseline_h) << ','
        << format_real(rep.lipschitz) << "\n";
    {
        std::vector<double> e, h;
        for (const auto& p : rep.points)
            if (p.h_rel != 0.0) {
                e.push_back(p.eps);
                h.push_back(std::fabs(p.h_rel));
            }
        SvgPlot plot("threshold shift vs family scale", "eps", "|h|", true, true);
        plot.add_series("|h(eps)|", e, h);
        plot.write(out + "/hscaling.svg");
    }
    write_manifest(out + "/manifest.txt", cfg, sd);
    return exit_ok;
}

int run_dispersive(const RunConfig& cfg, const std::string& out) {
    // (a) radiation bounds on the bisected trajectory of the configured family
    const RadialGrid grid = run_grid(cfg);
    const SpectralData sd = compute_ground_spectrum(grid, EigenMethod::matrix);
    const DataFamily fam = family_from_config(cfg, grid, sd);
    if (fam.family_norm <= 0.0)
        throw ConfigError(
            "dispersive: the radiation read-off needs a nonzero family "
            "(set family.f1_amplitude / f2_amplitude)");
    const SolverConfig scfg = solver_config(cfg);
    const ThresholdResult thr = bisect_from_config(fam, sd, cfg, scfg, cfg.dispersive_threshold_tol);
    const TrajectoryRecord ref = run_reference(fam, thr, sd, scfg, scfg.t_max, /*snapshots=*/true);
    const DispersiveReport rad = measure_radiation(ref);
    const GammaSeries gamma = phase_correction(ref, sd);

    {
        auto os = open_out(out + "/radiation.csv");
        os << "sup_decay_slope,fit_t0,fit_t1,alpha_inf,alpha_decay_slope,alpha_avg_sup,"
              "alpha_avg_bound,truncated,valid_until,gamma_sup\n";
        os << format_real(rad.sup_decay_slope) << ',' << format_real(rad.fit_t0) << ','
           << format_real(rad.fit_t1) << ',' << format_real(rad.alpha_inf) << ','
           << format_real(rad.alpha_decay_slope) << ',' << format_real(rad.alpha_avg_sup) << ','
           << format_real(rad.alpha_avg_bound) << ',' << (rad.truncated ? "true" : "false") << ','
           << format_real(rad.valid_until) << ',' << format_real(gamma.sup_abs) << "\n";
    }
    {
        auto os = open_out(out + "/radiation_partials.csv");
        os << "t,I_probe0,I_probe1,I_probe2,I_probe3\n";
        for (size_t i = 0; i < rad.partial_times.size(); ++i)
            os << format_real(rad.partial_times[i]) << ',' << format_real(rad.partial_integrals[i][0])
               << ',' << format_real(rad.partial_integrals[i][1]) << ','
               << format_real(rad.partial_integrals[i][2]) << ','
               << format_real(rad.partial_integrals[i][3]) << "\n";
    }
    {
        auto os = open_out(out + "/gamma.csv");
        os << "t,gamma\n";
        for (size_t i = 0; i < gamma.times.size(); ++i)
            os << format_real(gamma.times[i]) << ',' << format_real(gamma.gamma[i]) << "\n";
    }
    {
        std::vector<double> t, s;
        for (size_t i = 0; i < ref.times.size(); ++i)
            if (std::isfinite(ref.v_sup[i]) && ref.v_sup[i] > 0.0 && ref.times[i] > 0.0) {
                t.push_back(ref.times[i]);
                s.push_back(ref.v_sup[i]);
            }
        SvgPlot plot("radiation sup-norm decay", "t", "sup|u_*|", true, true);
        plot.add_series("sup|u_*(t)|", t, s);
        plot.write(out + "/decay_loglog.svg");
    }
    {
        SvgPlot plot("partial L_t^1 integrals", "t", "I(x_j, T)");
        for (size_t j = 0; j < 4; ++j) {
            std::vector<double> I;
            I.reserve(rad.partial_times.size());
            for (const auto& row : rad.partial_integrals) I.push_back(row[j]);
            plot.add_series("r = " + format_real(rad.probe_radii[j]), rad.partial_times, I);
        }
        plot.write(out + "/partials_staircase.svg");
    }

    // (b) linear dispersive suite on its own larger grid
    const double ldr = cfg.grid_dr;
    int n = static_cast<int>(std::lround(cfg.dispersive_linear_r_max / ldr)) + 1;
    if (n % 2 == 0) ++n;
    const RadialGrid lgrid(n, ldr);
    const SpectralData lsd = compute_ground_spectrum(lgrid, EigenMethod::matrix);
    LinearCheckConfig lcfg;
    lcfg.t_max = cfg.dispersive_linear_t_max;
    lcfg.support_radius = cfg.family_support_radius;
    const double R = lcfg.support_radius;
    lcfg.probe_radii = {0.0, 0.5 * R, R, 2.0 * R};

    auto bump = [&](double amp, double center, double width) {
        RadialField f(lgrid);
        for (int i = 0; i < lgrid.n_points; ++i) {
            const double z = (lgrid.r(i) - center) / width;
            f[i] = amp * std::exp(-z * z) * smooth_cutoff(lgrid.r(i) / R);
        }
        return f;
    };

    auto os = open_out(out + "/dispersive_linear.csv");
    os << "mode,potential,dilation,ratio,data_norm,huygens_residual,plateau_cosine_vs_LamW,"
          "plateau_variation,tail0,tail1,tail2,tail3\n";
    auto emit = [&](const char* mode_name, const char* pot_name, double mu,
                    const LinearDispersiveReport& rep) {
        os << mode_name << ',' << pot_name << ',' << format_real(mu) << ','
           << format_real(rep.ratio) << ',' << format_real(rep.data_norm) << ','
           << format_real(rep.huygens_residual) << ','
           << format_real(rep.plateau_cosine_vs_LamW) << ','
           << format_real(rep.plateau_variation) << ',' << format_real(rep.tail_ratio[0]) << ','
           << format_real(rep.tail_ratio[1]) << ',' << format_real(rep.tail_ratio[2]) << ','
           << format_real(rep.tail_ratio[3]) << "\n";
    };

    // free cos: Huygens saturation
    emit("cos", "free", 1.0,
         linear_dispersive_check(bump(1.0, 2.0, 0.5), LinearDataMode::cos_mode, PotentialMode::free,
                                 lsd, lcfg));
    // free sin/cos under dilations (narrow bump: derivative-dominated norm)
    for (auto mode : {LinearDataMode::sin_mode, LinearDataMode::cos_mode}) {
        for (double mu : {0.5, 1.0, 2.0}) {
            RadialField f(lgrid);
            for (int i = 0; i < lgrid.n_points; ++i) {
                const double z = (mu * lgrid.r(i) - 2.0) / 0.3;
                f[i] = std::exp(-z * z) * smooth_cutoff(mu * lgrid.r(i) / R);
            }
            emit(mode == LinearDataMode::sin_mode ? "sin" : "cos", "free", mu,
                 linear_dispersive_check(f, mode, PotentialMode::free, lsd, lcfg));
        }
    }
    // soliton potential: sin (plateau) and cos, data projected off g0 inside
    const LinearDispersiveReport sin_pot = linear_dispersive_check(
        bump(1.0, 1.5, 0.6), LinearDataMode::sin_mode, PotentialMode::with_potential, lsd, lcfg);
    emit("sin", "potential", 1.0, sin_pot);
    emit("cos", "potential", 1.0,
         linear_dispersive_check(bump(1.0, 1.5, 0.6), LinearDataMode::cos_mode,
                                 PotentialMode::with_potential, lsd, lcfg));
    if (!sin_pot.plateau_field.empty()) {
        RadialField pf(lgrid);
        pf.values = sin_pot.plateau_field;
        write_field_csv(out + "/plateau_field.csv", pf);
    }
    write_manifest(out + "/manifest.txt", cfg, sd);
    return exit_ok;
}

}  // namespace

int run_subcommand(const std::string& name, const RunConfig& cfg, const std::string& out_dir,
                   std::string* error) {
    try {
        fs::create_directories(out_dir);
        if (name == "spectrum") return run_spectrum(cfg, out_dir);
        if (name == "evolve") return run_evolve(cfg, out_dir);
        if (name == "threshold") return run_threshold(cfg, out_dir);
        if (name == "ejection") return run_ejection(cfg, out_dir);
        if (name == "bootstrap") return run_bootstrap(cfg, out_dir);
        if (name == "hscaling") return run_hscaling(cfg, out_dir);
        if (name == "dispersive") return run_dispersive(cfg, out_dir);
        if (error) *error = "unknown subcommand '" + name + "'";
        return exit_config_error;
    } catch (const ConfigError& e) {
        if (error) *error = e.what();
        return exit_config_error;
    } catch (const UndeterminedError& e) {
        if (error) *error = e.what();
        return exit_undetermined;
    } catch (const fs::filesystem_error& e) {
        if (error) *error = e.what();
        return exit_io_error;
    } catch (const std::exception& e) {
        if (error) *error = e.what();
        return exit_numerical_error;
    }
}

}  // namespace critwave
