#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "critwave/grid.hpp"
#include "critwave/ground_state.hpp"
#include "critwave/spectrum.hpp"

namespace critwave {

struct SolverConfig {
    double cfl = 0.5;                          // dt = cfl * dr, cfl in (0,1]
    double t_max = 60.0;
    double blowup_sup_threshold = 1e4;
    double decay_local_energy_threshold = 1e-4;  // relative to initial local energy
    double decay_sup_threshold = 1e-2;           // relative to initial local sup
    double dwell_time = 5.0;                     // decay must persist this long
    double causal_margin = 2.0;                  // valid while R + t + margin < r_max
    int record_stride = 8;                       // steps between probe records
    bool store_snapshots = false;                // keep u(t) at record times
    bool drop_nonlinearity = false;              // RK4 without the u^5 term

    double dt(double dr) const { return cfl * dr; }
    void validate() const;
};

struct Outcome {
    enum class Tag { blowup, decay, undetermined };
    Tag tag = Tag::undetermined;
    double t = 0.0;  // t_star for blowup, time reached otherwise
    std::string reason;

    bool is_blowup() const { return tag == Tag::blowup; }
    bool is_decay() const { return tag == Tag::decay; }
    static const char* name(Tag t);
};

// Per-record diagnostics of one evolution. Columns share indexing with
// `times`; modulation columns hold NaN once the frame leaves its validity
// window (frames_valid_until marks the cutoff).
struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<double> energy;        // conserved discrete energy
    std::vector<double> sup_norm;      // sup |u| over the causally valid region
    std::vector<double> local_energy;  // positive-density energy on r <= 2R
    std::vector<double> alpha;         // modulation frame (NaN when untracked)
    std::vector<double> delta;         // <v, g_alpha>
    std::vector<double> ortho_res;     // <v, Lambda* g_alpha>
    std::vector<double> v_l2, v_h1, v_h2, v_sup;
    std::vector<std::array<double, 4>> v_probe;  // v at probe radii
    std::vector<std::array<double, 4>> u_probe;  // raw u at probe radii
    std::vector<double> mode_coeff;              // <u, g0> (linear runs)

    std::vector<std::vector<double>> snapshots;  // u values, when stored
    double frames_valid_until = 0.0;
    std::array<double, 4> probe_radii{};
    Outcome outcome;
};

// What to measure along a run. spectrum == nullptr disables modulation
// tracking (classification-only runs are much cheaper).
struct EvolutionProbes {
    const SpectralData* spectrum = nullptr;
    double support_radius = 5.0;                  // R of the perturbation
    std::optional<double> background_lambda;      // soliton background, if any
    std::array<double, 4> probe_radii = {0.0, 2.5, 5.0, 10.0};
};

// One classical RK4 step of u_tt = Lap u + u^5 (Laplacian through w = r*u,
// which removes the 2/r singularity exactly; w is odd, w(0) = 0).
WaveState step_nonlinear(const WaveState& s, const SolverConfig& cfg);

// Evolve until classification or t_max. Updates run only on the active
// causal window r <= R + t + pad; outside it the state stays pinned at its
// initial values, which is exact by finite speed of propagation.
TrajectoryRecord evolve(const WaveState& s0, const SolverConfig& cfg,
                        const EvolutionProbes& probes);

enum class PotentialMode { free, with_potential };

// Leapfrog integrator for u_tt + H(lambda) u = 0 (or u_tt = Lap u in free
// mode). In free mode with cfl = 1 the scheme reproduces d'Alembert exactly
// on the lattice (including strong Huygens). project_unstable removes the
// discrete unstable mode every step, realizing the P_c flow; leave it off
// to observe cosh(k t) eigenmode growth.
TrajectoryRecord evolve_linear(const WaveState& s0, const SolitonParams& p,
                               const SolverConfig& cfg, PotentialMode mode,
                               const EvolutionProbes& probes,
                               bool project_unstable = false);

}  // namespace critwave
