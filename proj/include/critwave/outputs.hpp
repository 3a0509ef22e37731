#pragma once

#include <string>

#include "critwave/config.hpp"
#include "critwave/solver.hpp"
#include "critwave/spectrum.hpp"

namespace critwave {

// Process-style exit codes shared by the CLI and the C API.
enum ExitCode : int {
    exit_ok = 0,
    exit_config_error = 2,
    exit_undetermined = 3,
    exit_numerical_error = 4,
    exit_io_error = 5,
};

// 17-significant-digit decimal, shortest round-trip not required; CSVs use
// this for every real so identical runs are byte-identical.
std::string format_real(double x);

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& traj);

// manifest.txt: resolved config + spectral certificate + code version.
void write_manifest(const std::string& path, const RunConfig& cfg, const SpectralData& sd);

// Dispatch a subcommand (spectrum, evolve, threshold, ejection, bootstrap,
// hscaling, dispersive) with a resolved config; writes CSVs, SVG plots and
// manifest.txt under out_dir. Returns an ExitCode; on nonzero, *error holds
// the reason.
int run_subcommand(const std::string& name, const RunConfig& cfg, const std::string& out_dir,
                   std::string* error);

}  // namespace critwave
