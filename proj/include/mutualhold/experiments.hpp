#pragma once

#include <iosfwd>
#include <string>

#include "mutualhold/config.hpp"

namespace mutualhold {

// ---------------------------------------------------------------------------
// Experiment drivers behind the CLI subcommands.  Each writes CSV files into
// the configured output directory; every file starts with '#' comment lines
// carrying the config hash and seed, and all numbers are fixed six-decimal,
// locale-independent, so identical configurations reproduce identical bytes.
// Progress and results go to `log`; the return value is the process exit
// code (non-zero when a run-time assertion fails).
// ---------------------------------------------------------------------------

// Solves the fixed point; writes iteration_convergence.csv (checkpoint
// iterates), default_curve.csv and diagnostics.txt.
int run_fixed_point_command(const ExperimentConfig& cfg, std::ostream& log);

// Baseline vs equilibrium particle system vs fixed point; writes compare.csv
// with columns t,D_tilde,D_particle,D_fixedpoint,se_tilde,se_particle plus
// compare_diagnostics.txt.  Fails (non-zero) if an equilibrium default curve
// exceeds the baseline beyond three combined standard errors anywhere.
int run_compare_command(const ExperimentConfig& cfg, std::ostream& log);

// Single particle-system run; mode is "equilibrium", "baseline" or
// "smoothed" (the latter at the given mollifier level).  Writes
// survival_curve.csv.
int run_simulate_command(const ExperimentConfig& cfg, const std::string& mode,
                         int smoothing_level, std::ostream& log);

// Formatting helpers shared with the validation suite.
std::string format_fixed(double v);

}  // namespace mutualhold
