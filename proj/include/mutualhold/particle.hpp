#pragma once

#include <cstdint>
#include <vector>

#include "mutualhold/model.hpp"

namespace mutualhold {

// ---------------------------------------------------------------------------
// Interacting particle system with absorption at the origin, plus the
// mollified (non-absorbed) variant used to study the smoothing limit.
// ---------------------------------------------------------------------------

enum class AbsorptionScheme { BrownianBridge, Discrete };

// Initial laws are supported in (0, infinity); anything else is rejected.
struct InitialLaw {
  enum class Kind { Exponential, PointMass };
  Kind kind = Kind::Exponential;
  double param = 1.0;  // rate for Exponential, the point for PointMass

  static InitialLaw exponential(double rate);
  static InitialLaw point_mass(double x0);

  // Draw for particle `index`; a pure function of (seed, index).
  double sample(std::uint64_t seed, std::uint64_t index) const;
};

enum class SimMode { Equilibrium, Baseline, Frozen };

// Coefficient source for one Euler step.  Equilibrium reads the interaction
// off the current empirical measure, Frozen off a fixed curve, Baseline uses
// the raw (b, sigma) pair.
struct StepMode {
  SimMode kind = SimMode::Baseline;
  const SurvivalCurve* curve = nullptr;

  static StepMode equilibrium() { return {SimMode::Equilibrium, nullptr}; }
  static StepMode baseline() { return {SimMode::Baseline, nullptr}; }
  static StepMode frozen(const SurvivalCurve& c) {
    return {SimMode::Frozen, &c};
  }
};

struct ParticleEnsemble {
  std::vector<double> positions;    // absorbed particles sit exactly at 0
  std::vector<double> running_min;  // running minimum of the discrete path
  std::vector<std::uint8_t> absorbed;
  double time = 0.0;
  std::uint64_t step_index = 0;  // advances the per-step noise counters
  std::uint64_t master_seed = 0;
  std::uint64_t clip_events = 0;  // positions capped at the overflow guard

  std::size_t size() const { return positions.size(); }
  std::size_t alive_count() const;
  double survival_fraction() const;
  WeightedMeasure empirical_measure() const;
};

// Summary of the interaction used for one step (also a per-time diagnostic).
struct StepSummary {
  double mass = 0.0;           // alive mass entering the coefficient formulas
  double holding_drift = 0.0;  // aggregate holding drift at this time
};

ParticleEnsemble sample_initial(const InitialLaw& law, std::size_t count,
                                std::uint64_t seed);

// Smoothed initial law at the given level n: |Z|/n + max(X0, 1/n) with Z a
// standard Gaussian and X0 a draw from the base law (same draw the plain
// sampler would produce, so runs at different levels stay coupled).
ParticleEnsemble sample_initial_smoothed(const InitialLaw& law, int level,
                                         std::size_t count,
                                         std::uint64_t seed);

// One Euler step of the absorbed system.  Noise comes from the ensemble's
// (seed, particle, step) counters.  Returns the interaction summary used.
StepSummary step_absorbed(ParticleEnsemble& ens, double dt,
                          const DriftVolSpec& spec, const StepMode& mode,
                          AbsorptionScheme scheme);

// Same step with the interaction summary supplied by the caller (avoids
// recomputing it when the caller already has it for recording).
void step_absorbed_with_summary(ParticleEnsemble& ens, double dt,
                                const DriftVolSpec& spec, const StepMode& mode,
                                AbsorptionScheme scheme,
                                const StepSummary& summary);

// Deterministic variant for tests: per-particle Gaussian increments and
// bridge uniforms are injected instead of drawn.
void step_absorbed_with_noise(ParticleEnsemble& ens, double dt,
                              const DriftVolSpec& spec, const StepMode& mode,
                              AbsorptionScheme scheme,
                              const StepSummary& summary,
                              const std::vector<double>& gaussians,
                              const std::vector<double>& uniforms);

struct PathRecord {
  std::vector<double> times;
  std::vector<double> survival_fraction;
  std::vector<double> empirical_c1;  // interaction drift at each grid time
  std::vector<std::vector<double>> trajectories;  // per grid time, optional
  std::size_t particle_count = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t clip_events = 0;
};

struct SimulateOptions {
  double horizon = 10.0;
  std::size_t steps = 100;
  std::size_t particles = 2000;
  InitialLaw law = InitialLaw::exponential(1.0);
  AbsorptionScheme scheme = AbsorptionScheme::BrownianBridge;
  std::uint64_t seed = 1;
  bool store_paths = false;
};

// Run the absorbed system on the uniform grid t_k = k * horizon / steps.
PathRecord simulate(const SimulateOptions& opts, const DriftVolSpec& spec,
                    const StepMode& mode);

// Run the mollified system at smoothing level n.  Particles are never
// absorbed by the dynamics; a particle leaves the alive set once its running
// minimum reaches the origin (including in-step bridge crossings under the
// BrownianBridge scheme), which is exactly when its mollified weight
// vanishes for good.
PathRecord simulate_smoothed(int level, const SimulateOptions& opts,
                             const DriftVolSpec& spec);

// Default probability and binomial standard error read off a record.
std::vector<double> default_probability(const PathRecord& rec);
std::vector<double> survival_stderr(const PathRecord& rec);

// Baseline default curve: the raw (b, sigma) dynamics with absorption.
PathRecord baseline_default_curve(const SimulateOptions& opts,
                                  const DriftVolSpec& spec);

// Record -> curve, for frozen-coefficient replays.  Survival is floored at a
// tiny positive value to stay inside the curve's admissible range.
SurvivalCurve to_survival_curve(const PathRecord& rec);

}  // namespace mutualhold
