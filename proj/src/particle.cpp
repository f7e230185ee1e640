#include "mutualhold/particle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mutualhold/rng.hpp"

namespace mutualhold {

namespace {

// Overflow guard on particle positions; hitting it is counted and surfaced
// through the record so runaway configurations are visible.
constexpr double kPositionClip = 1e9;

double bridge_crossing_prob(double from, double to, double vol, double dt) {
  return std::exp(-2.0 * from * to / (vol * vol * dt));
}

StepSummary interaction_summary(const ParticleEnsemble& ens,
                                const DriftVolSpec& spec,
                                const StepMode& mode) {
  StepSummary s;
  switch (mode.kind) {
    case SimMode::Baseline:
      break;
    case SimMode::Equilibrium: {
      const WeightedMeasure m = ens.empirical_measure();
      s.mass = m.alive_mass();
      s.holding_drift = solve_holding_drift(ens.time, m, spec);
      break;
    }
    case SimMode::Frozen: {
      if (mode.curve == nullptr)
        throw std::invalid_argument("frozen mode needs a curve");
      const std::size_t idx = mode.curve->index_at(ens.time);
      s.mass = mode.curve->survival[idx];
      s.holding_drift = mode.curve->holding_drift[idx];
      break;
    }
  }
  return s;
}

}  // namespace

// --- InitialLaw ---------------------------------------------------------------

InitialLaw InitialLaw::exponential(double rate) {
  if (!(rate > 0.0))
    throw std::invalid_argument("exponential rate must be positive");
  return {Kind::Exponential, rate};
}

InitialLaw InitialLaw::point_mass(double x0) {
  if (!(x0 > 0.0))
    throw std::invalid_argument("initial point must be strictly positive");
  return {Kind::PointMass, x0};
}

double InitialLaw::sample(std::uint64_t seed, std::uint64_t index) const {
  switch (kind) {
    case Kind::Exponential:
      return rng::exponential(seed, rng::kInitialState, index, 0, param);
    case Kind::PointMass:
      return param;
  }
  return param;
}

// --- ParticleEnsemble ----------------------------------------------------------

std::size_t ParticleEnsemble::alive_count() const {
  std::size_t n = 0;
  for (const auto a : absorbed)
    if (!a) ++n;
  return n;
}

double ParticleEnsemble::survival_fraction() const {
  if (positions.empty()) return 0.0;
  return static_cast<double>(alive_count()) /
         static_cast<double>(positions.size());
}

WeightedMeasure ParticleEnsemble::empirical_measure() const {
  return WeightedMeasure::empirical(positions);
}

ParticleEnsemble sample_initial(const InitialLaw& law, std::size_t count,
                                std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("need at least one particle");
  ParticleEnsemble ens;
  ens.master_seed = seed;
  ens.positions.resize(count);
  for (std::size_t i = 0; i < count; ++i) ens.positions[i] = law.sample(seed, i);
  ens.running_min = ens.positions;
  ens.absorbed.assign(count, 0);
  return ens;
}

ParticleEnsemble sample_initial_smoothed(const InitialLaw& law, int level,
                                         std::size_t count,
                                         std::uint64_t seed) {
  if (level <= 0) throw std::invalid_argument("smoothing level must be >= 1");
  ParticleEnsemble ens = sample_initial(law, count, seed);
  const double n = static_cast<double>(level);
  for (std::size_t i = 0; i < count; ++i) {
    const double z = rng::gaussian(seed, rng::kInitialSmooth, i, 0);
    ens.positions[i] = std::abs(z) / n + std::max(ens.positions[i], 1.0 / n);
  }
  ens.running_min = ens.positions;
  return ens;
}

// --- Stepping -------------------------------------------------------------------

namespace {

// Core Euler update shared by the drawing and noise-injecting variants.
template <typename GaussFn, typename UnifFn>
void step_absorbed_core(ParticleEnsemble& ens, double dt,
                        const DriftVolSpec& spec, const StepMode& mode,
                        AbsorptionScheme scheme, const StepSummary& summary,
                        GaussFn&& gauss, UnifFn&& unif) {
  if (!(dt > 0.0)) throw std::invalid_argument("step size must be positive");
  const double t = ens.time;
  const double sq_dt = std::sqrt(dt);
  const bool raw = mode.kind == SimMode::Baseline;

  for (std::size_t i = 0; i < ens.positions.size(); ++i) {
    if (ens.absorbed[i]) continue;
    const double x = ens.positions[i];
    const double b = spec.drift_at(t, x);
    double drift;
    double vol;
    if (raw) {
      drift = b;
      vol = spec.vol_at(t, x);
    } else {
      drift = transformed_drift(b, summary.holding_drift, summary.mass);
      vol = transformed_vol(spec.vol_at(t, x), drift, summary.mass);
    }
    double next = x + drift * dt + vol * sq_dt * gauss(i);

    bool hit = next <= 0.0;
    if (!hit && scheme == AbsorptionScheme::BrownianBridge)
      hit = unif(i) < bridge_crossing_prob(x, next, vol, dt);
    if (hit) {
      ens.positions[i] = 0.0;
      ens.running_min[i] = 0.0;
      ens.absorbed[i] = 1;
      continue;
    }
    if (next > kPositionClip) {
      next = kPositionClip;
      ++ens.clip_events;
    }
    ens.positions[i] = next;
    ens.running_min[i] = std::min(ens.running_min[i], next);
  }
  ens.time += dt;
  ++ens.step_index;
}

}  // namespace

void step_absorbed_with_summary(ParticleEnsemble& ens, double dt,
                                const DriftVolSpec& spec, const StepMode& mode,
                                AbsorptionScheme scheme,
                                const StepSummary& summary) {
  const std::uint64_t seed = ens.master_seed;
  const std::uint64_t step = ens.step_index;
  step_absorbed_core(
      ens, dt, spec, mode, scheme, summary,
      [&](std::size_t i) { return rng::gaussian(seed, rng::kPathGauss, i, step); },
      [&](std::size_t i) {
        return rng::uniform(seed, rng::kBridgeUniform, i, step);
      });
}

StepSummary step_absorbed(ParticleEnsemble& ens, double dt,
                          const DriftVolSpec& spec, const StepMode& mode,
                          AbsorptionScheme scheme) {
  const StepSummary summary = interaction_summary(ens, spec, mode);
  step_absorbed_with_summary(ens, dt, spec, mode, scheme, summary);
  return summary;
}

void step_absorbed_with_noise(ParticleEnsemble& ens, double dt,
                              const DriftVolSpec& spec, const StepMode& mode,
                              AbsorptionScheme scheme,
                              const StepSummary& summary,
                              const std::vector<double>& gaussians,
                              const std::vector<double>& uniforms) {
  if (gaussians.size() != ens.size() || uniforms.size() != ens.size())
    throw std::invalid_argument("noise arrays must match the particle count");
  step_absorbed_core(
      ens, dt, spec, mode, scheme, summary,
      [&](std::size_t i) { return gaussians[i]; },
      [&](std::size_t i) { return uniforms[i]; });
}

// --- Full runs -------------------------------------------------------------------

namespace {

void validate_options(const SimulateOptions& opts) {
  if (!(opts.horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  if (opts.steps == 0) throw std::invalid_argument("need at least one step");
  if (opts.particles == 0)
    throw std::invalid_argument("need at least one particle");
}

void record_state(PathRecord& rec, const ParticleEnsemble& ens, double c1,
                  bool store_paths) {
  rec.survival_fraction.push_back(ens.survival_fraction());
  rec.empirical_c1.push_back(c1);
  if (store_paths) rec.trajectories.push_back(ens.positions);
}

}  // namespace

PathRecord simulate(const SimulateOptions& opts, const DriftVolSpec& spec,
                    const StepMode& mode) {
  validate_options(opts);
  const double dt = opts.horizon / static_cast<double>(opts.steps);

  ParticleEnsemble ens = sample_initial(opts.law, opts.particles, opts.seed);
  PathRecord rec;
  rec.particle_count = opts.particles;
  rec.master_seed = opts.seed;
  rec.times.resize(opts.steps + 1);
  for (std::size_t k = 0; k <= opts.steps; ++k)
    rec.times[k] = static_cast<double>(k) * dt;

  for (std::size_t k = 0; k < opts.steps; ++k) {
    // The recorded interaction drift is the diagnostic of the empirical
    // measure at t_k; in equilibrium mode it is also what the step uses.
    const double emp_c1 =
        solve_holding_drift(ens.time, ens.empirical_measure(), spec);
    record_state(rec, ens, emp_c1, opts.store_paths);

    StepSummary summary;
    if (mode.kind == SimMode::Equilibrium) {
      summary.mass = ens.survival_fraction();
      summary.holding_drift = emp_c1;
    } else {
      summary = interaction_summary(ens, spec, mode);
    }
    step_absorbed_with_summary(ens, dt, spec, mode, opts.scheme, summary);
  }
  const double final_c1 =
      solve_holding_drift(ens.time, ens.empirical_measure(), spec);
  record_state(rec, ens, final_c1, opts.store_paths);
  rec.clip_events = ens.clip_events;
  return rec;
}

PathRecord simulate_smoothed(int level, const SimulateOptions& opts,
                             const DriftVolSpec& spec) {
  validate_options(opts);
  if (level <= 0) throw std::invalid_argument("smoothing level must be >= 1");
  const double dt = opts.horizon / static_cast<double>(opts.steps);
  const double sq_dt = std::sqrt(dt);
  const std::size_t count = opts.particles;

  ParticleEnsemble ens =
      sample_initial_smoothed(opts.law, level, count, opts.seed);
  PathRecord rec;
  rec.particle_count = count;
  rec.master_seed = opts.seed;
  rec.times.resize(opts.steps + 1);
  for (std::size_t k = 0; k <= opts.steps; ++k)
    rec.times[k] = static_cast<double>(k) * dt;

  // Atoms sit at the mollified states y * H_n(min); once the running minimum
  // reaches the origin the weight is zero forever, so the particle is parked
  // at 0 and skipped from then on.
  std::vector<double> mollified(count);
  const auto mollify = [&]() {
    for (std::size_t i = 0; i < count; ++i)
      mollified[i] = ens.absorbed[i]
                         ? 0.0
                         : ens.positions[i] *
                               smoothed_heaviside(level, ens.running_min[i]);
  };

  for (std::size_t k = 0; k <= opts.steps; ++k) {
    mollify();
    const WeightedMeasure measure = WeightedMeasure::empirical(mollified);
    double mass = 0.0;
    for (const double y : mollified)
      mass += smoothed_heaviside(level, y) / static_cast<double>(count);
    const double c1 =
        solve_smoothed_holding_drift(level, ens.time, measure, spec);
    record_state(rec, ens, c1, opts.store_paths);
    if (k == opts.steps) break;

    for (std::size_t i = 0; i < count; ++i) {
      if (ens.absorbed[i]) continue;
      const double y = ens.positions[i];
      const double v = spec.drift_at(ens.time, y) + c1;
      const double drift = v > 0.0 ? v / (1.0 + mass) : v;
      const double vol =
          spec.vol_at(ens.time, y) /
          (1.0 + mass * smoothed_heaviside(level, drift));
      const double g =
          rng::gaussian(ens.master_seed, rng::kPathGauss, i, ens.step_index);
      double next = y + drift * dt + vol * sq_dt * g;

      bool dead = std::min(ens.running_min[i], next) <= 0.0;
      if (!dead && opts.scheme == AbsorptionScheme::BrownianBridge) {
        const double u = rng::uniform(ens.master_seed, rng::kBridgeUniform, i,
                                      ens.step_index);
        dead = u < bridge_crossing_prob(y, next, vol, dt);
      }
      if (dead) {
        ens.positions[i] = 0.0;
        ens.running_min[i] = 0.0;
        ens.absorbed[i] = 1;
        continue;
      }
      if (next > kPositionClip) {
        next = kPositionClip;
        ++ens.clip_events;
      }
      ens.positions[i] = next;
      ens.running_min[i] = std::min(ens.running_min[i], next);
    }
    ens.time += dt;
    ++ens.step_index;
  }
  rec.clip_events = ens.clip_events;
  return rec;
}

std::vector<double> default_probability(const PathRecord& rec) {
  std::vector<double> d(rec.survival_fraction.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = 1.0 - rec.survival_fraction[i];
  return d;
}

std::vector<double> survival_stderr(const PathRecord& rec) {
  std::vector<double> se(rec.survival_fraction.size());
  const double n = static_cast<double>(rec.particle_count);
  for (std::size_t i = 0; i < se.size(); ++i) {
    const double p = rec.survival_fraction[i];
    se[i] = std::sqrt(std::max(p * (1.0 - p), 0.0) / n);
  }
  return se;
}

PathRecord baseline_default_curve(const SimulateOptions& opts,
                                  const DriftVolSpec& spec) {
  return simulate(opts, spec, StepMode::baseline());
}

SurvivalCurve to_survival_curve(const PathRecord& rec) {
  std::vector<double> surv = rec.survival_fraction;
  for (double& s : surv) s = std::max(s, 1e-12);
  return SurvivalCurve(rec.times, std::move(surv), rec.empirical_c1);
}

}  // namespace mutualhold
