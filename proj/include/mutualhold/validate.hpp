#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mutualhold/config.hpp"

namespace mutualhold {

// ---------------------------------------------------------------------------
// Self-validation: randomized property checks and oracle comparisons that the
// `validate` subcommand runs end to end.  Checks never throw on failed
// properties; they report, so one broken invariant does not hide the rest.
// ---------------------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool pass = false;
  bool warn = false;  // advisory only; does not affect the exit code
  std::string detail;
};

// Fault-injection hooks so the suite itself is testable: a nonzero drift
// perturbation is added to the computed equilibrium drift inside the
// closed-form identity checks, which must then fail.
struct ValidationHooks {
  double drift_perturbation = 0.0;
};

std::vector<CheckResult> run_validation(const ExperimentConfig& cfg,
                                        const ValidationHooks& hooks = {});

// Prints one line per check and returns 0 when everything passed.
int run_validate_command(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace mutualhold
