#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mutualhold/model.hpp"
#include "mutualhold/particle.hpp"

namespace mutualhold {

// ---------------------------------------------------------------------------
// Autonomous fixed point for the survival / holding-drift pair.
//
// One application of the map simulates, per Monte-Carlo draw m, the frozen-
// coefficient diffusion started from the initial law at time 0 together with
// one restart path launched from the origin at every grid time t_k.  All of
// them share the same Gaussian increment G_{m,i} for the step t_i -> t_{i+1},
// so a single forward sweep per draw advances every restart path at once and
// the "bank" of restart paths never needs to be materialised.  The updated
// values are
//   survival'(t_n) = P[path alive at t_n]
//                    + sum_{k < n} P[restart_k > 0 at t_n] * d survival(t_k),
// and the same sum with the positive part of the frozen drift at t_n inside
// the expectation for holding_drift'.  Per-draw contributions are also
// squared-accumulated, which yields exact Monte-Carlo standard errors.
//
// Accumulation runs over fixed-size chunks of draws that are reduced in chunk
// order, so results are bit-identical for any thread count.
// ---------------------------------------------------------------------------

struct FixedPointOptions {
  std::size_t draws = 2000;  // Monte-Carlo sample size M
  std::uint64_t seed = 1;
  bool crn = true;  // reuse one noise table across iterates
  bool monotone_projection = true;  // isotonic regularisation of survival'
  std::size_t threads = 1;          // 0 = hardware concurrency

  // Test hooks: force all Euler increments to zero and/or override the
  // initial draws (indexed by m).
  bool zero_noise = false;
  const std::vector<double>* forced_initial = nullptr;
};

struct MapResult {
  SurvivalCurve curve;
  std::vector<double> survival_se;  // MC standard error per grid time
  std::vector<double> drift_se;
  double min_drift_estimate = 0.0;  // smallest holding-drift value pre-clamp
  double max_increase = 0.0;        // largest upward survival step pre-projection
};

// One sweep of the map.  `iterate_index` salts the noise in non-CRN mode and
// is ignored otherwise.  The input survival values must be non-increasing
// (guaranteed for curves built through the checked constructor); when the
// monotone projection is disabled the output is only range-clamped and the
// input check is waived, since unprojected estimates carry MC noise.
MapResult apply_fixed_point_map(const SurvivalCurve& input,
                                const InitialLaw& law,
                                const DriftVolSpec& spec,
                                const FixedPointOptions& opts,
                                std::uint64_t iterate_index = 0);

struct IterateDiagnostics {
  std::vector<double> deltas;  // sup-norm change per iterate
  std::size_t iterations = 0;
  bool converged = false;  // last delta fell below stop_tol (if positive)
};

struct IterateResult {
  SurvivalCurve curve;
  IterateDiagnostics diagnostics;
  std::vector<double> survival_se;  // from the final sweep
};

// Called after each sweep with (iterate number, current curve, delta).
using IterateObserver =
    std::function<void(std::size_t, const SurvivalCurve&, double)>;

// Repeated application until the sup-norm change in (survival, holding_drift)
// drops below stop_tol or max_iterates is reached.  stop_tol <= 0 disables
// early stopping.  Non-convergence is reported, never thrown.
IterateResult iterate_fixed_point(const SurvivalCurve& start,
                                  std::size_t max_iterates, double stop_tol,
                                  const InitialLaw& law,
                                  const DriftVolSpec& spec,
                                  const FixedPointOptions& opts,
                                  const IterateObserver& observer = nullptr);

// Canonical starting guess on the given grid: survival identically 1 and the
// holding drift frozen at its time-0 value under a sampled initial measure.
SurvivalCurve initial_curve(const std::vector<double>& grid,
                            const InitialLaw& law, const DriftVolSpec& spec,
                            const FixedPointOptions& opts);

struct FixedPointRun {
  SurvivalCurve curve;
  std::vector<double> default_probability;  // 1 - survival
  std::vector<double> survival_se;
  IterateDiagnostics diagnostics;
};

// End-to-end solve on the uniform grid with `steps` intervals over [0, T].
FixedPointRun fixed_point_default_curve(double horizon, std::size_t steps,
                                        std::size_t max_iterates,
                                        double stop_tol, const InitialLaw& law,
                                        const DriftVolSpec& spec,
                                        const FixedPointOptions& opts,
                                        const IterateObserver& observer =
                                            nullptr);

// Least-squares projection onto non-increasing sequences
// (pool-adjacent-violators, equal weights).
std::vector<double> monotone_decreasing_projection(std::vector<double> values);

}  // namespace mutualhold
