#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mutualhold/particle.hpp"

using namespace mutualhold;

namespace {

const DriftVolSpec kOu(DriftSpec::ornstein_uhlenbeck(1.0),
                       VolSpec::constant(1.0), SignRegime::SignChanging);

}  // namespace

TEST_CASE("initial laws validate and sample deterministically") {
  CHECK_THROWS_AS(InitialLaw::exponential(0.0), std::invalid_argument);
  CHECK_THROWS_AS(InitialLaw::point_mass(-1.0), std::invalid_argument);
  const InitialLaw exp_law = InitialLaw::exponential(2.0);
  CHECK(exp_law.sample(7, 3) == exp_law.sample(7, 3));
  CHECK(exp_law.sample(7, 3) != exp_law.sample(7, 4));
  CHECK(InitialLaw::point_mass(1.5).sample(7, 3) == 1.5);

  double mean = 0.0;
  const std::size_t n = 20000;
  for (std::size_t i = 0; i < n; ++i) mean += exp_law.sample(1, i);
  CHECK(mean / n == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("sampled ensembles start alive and strictly positive") {
  const ParticleEnsemble ens =
      sample_initial(InitialLaw::exponential(1.0), 500, 3);
  CHECK(ens.size() == 500);
  CHECK(ens.alive_count() == 500);
  CHECK(ens.survival_fraction() == 1.0);
  for (std::size_t i = 0; i < ens.size(); ++i) {
    CHECK(ens.positions[i] > 0.0);
    CHECK(ens.running_min[i] == ens.positions[i]);
    CHECK(ens.absorbed[i] == 0);
  }
  CHECK_THROWS_AS(sample_initial(InitialLaw::exponential(1.0), 0, 3),
                  std::invalid_argument);
}

TEST_CASE("smoothed initial states couple to the plain ones") {
  const std::size_t n = 1000;
  const ParticleEnsemble plain =
      sample_initial(InitialLaw::exponential(1.0), n, 9);
  const ParticleEnsemble coarse =
      sample_initial_smoothed(InitialLaw::exponential(1.0), 1, n, 9);
  const ParticleEnsemble fine =
      sample_initial_smoothed(InitialLaw::exponential(1.0), 1000, n, 9);
  double sup = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(coarse.positions[i] >= plain.positions[i]);
    CHECK(fine.positions[i] >= plain.positions[i]);
    sup = std::max(sup, fine.positions[i] - plain.positions[i]);
  }
  CHECK(sup < 0.05);  // (|Z| + 1) / level at level 1000
  CHECK_THROWS_AS(sample_initial_smoothed(InitialLaw::exponential(1.0), 0, n, 9),
                  std::invalid_argument);
}

TEST_CASE("euler step arithmetic with injected zero noise") {
  const DriftVolSpec pull(DriftSpec::ornstein_uhlenbeck(0.0),
                          VolSpec::constant(1.0), SignRegime::NonPositive);
  ParticleEnsemble ens = sample_initial(InitialLaw::point_mass(5.0), 1, 1);
  step_absorbed_with_noise(ens, 0.01, pull, StepMode::baseline(),
                           AbsorptionScheme::Discrete, StepSummary{}, {0.0},
                           {1.0});
  CHECK(ens.positions[0] == doctest::Approx(4.95).epsilon(1e-14));
  CHECK(ens.time == doctest::Approx(0.01));
  CHECK(ens.step_index == 1);
  CHECK(ens.absorbed[0] == 0);
  CHECK(ens.running_min[0] == doctest::Approx(4.95));

  CHECK_THROWS_AS(
      step_absorbed_with_noise(ens, 0.0, pull, StepMode::baseline(),
                               AbsorptionScheme::Discrete, StepSummary{}, {0.0},
                               {1.0}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      step_absorbed_with_noise(ens, 0.01, pull, StepMode::baseline(),
                               AbsorptionScheme::Discrete, StepSummary{}, {},
                               {1.0}),
      std::invalid_argument);
}

TEST_CASE("crossing the origin absorbs permanently") {
  const DriftVolSpec flat(DriftSpec::constant(0.0), VolSpec::constant(1.0),
                          SignRegime::NonPositive);
  ParticleEnsemble ens = sample_initial(InitialLaw::point_mass(1.0), 1, 1);
  step_absorbed_with_noise(ens, 0.01, flat, StepMode::baseline(),
                           AbsorptionScheme::Discrete, StepSummary{}, {-20.0},
                           {1.0});
  CHECK(ens.absorbed[0] == 1);
  CHECK(ens.positions[0] == 0.0);
  CHECK(ens.running_min[0] == 0.0);
  CHECK(ens.alive_count() == 0);

  // A later upward shock must not revive it.
  step_absorbed_with_noise(ens, 0.01, flat, StepMode::baseline(),
                           AbsorptionScheme::Discrete, StepSummary{}, {10.0},
                           {1.0});
  CHECK(ens.absorbed[0] == 1);
  CHECK(ens.positions[0] == 0.0);
}

TEST_CASE("in-step crossing test fires on the bridge scheme only") {
  const DriftVolSpec flat(DriftSpec::constant(0.0), VolSpec::constant(1.0),
                          SignRegime::NonPositive);
  // Both endpoints sit at 1, so the crossing probability is exp(-200):
  // a uniform of 0 lies below it, a uniform of 1 does not.
  ParticleEnsemble hit = sample_initial(InitialLaw::point_mass(1.0), 1, 1);
  step_absorbed_with_noise(hit, 0.01, flat, StepMode::baseline(),
                           AbsorptionScheme::BrownianBridge, StepSummary{},
                           {0.0}, {0.0});
  CHECK(hit.absorbed[0] == 1);

  ParticleEnsemble safe = sample_initial(InitialLaw::point_mass(1.0), 1, 1);
  step_absorbed_with_noise(safe, 0.01, flat, StepMode::baseline(),
                           AbsorptionScheme::BrownianBridge, StepSummary{},
                           {0.0}, {1.0});
  CHECK(safe.absorbed[0] == 0);

  // The discrete scheme only looks at the endpoint.
  ParticleEnsemble disc = sample_initial(InitialLaw::point_mass(1.0), 1, 1);
  step_absorbed_with_noise(disc, 0.01, flat, StepMode::baseline(),
                           AbsorptionScheme::Discrete, StepSummary{}, {0.0},
                           {0.0});
  CHECK(disc.absorbed[0] == 0);
}

TEST_CASE("nonpositive constant drift: equilibrium equals baseline bitwise") {
  // With b <= 0 the holding drift is exactly 0 and the transformation is the
  // identity, so the two modes must produce identical paths, not just close.
  const DriftVolSpec neg(DriftSpec::constant(-0.3), VolSpec::constant(1.0),
                         SignRegime::NonPositive);
  SimulateOptions opts;
  opts.horizon = 2.0;
  opts.steps = 40;
  opts.particles = 300;
  opts.law = InitialLaw::exponential(1.0);
  opts.seed = 17;
  opts.store_paths = true;
  const PathRecord eq = simulate(opts, neg, StepMode::equilibrium());
  const PathRecord base = simulate(opts, neg, StepMode::baseline());
  REQUIRE(eq.trajectories.size() == base.trajectories.size());
  for (std::size_t k = 0; k < eq.trajectories.size(); ++k)
    for (std::size_t i = 0; i < opts.particles; ++i)
      CHECK(eq.trajectories[k][i] == base.trajectories[k][i]);
  for (std::size_t k = 0; k < eq.empirical_c1.size(); ++k)
    CHECK(eq.empirical_c1[k] == 0.0);
}

TEST_CASE("frozen mode with a trivial curve matches baseline bitwise") {
  // survival 1 and holding drift 0 freeze the coefficients at the raw pair
  // when the drift is nonpositive.
  const DriftVolSpec neg(DriftSpec::constant(-0.5), VolSpec::constant(1.0),
                         SignRegime::NonPositive);
  const SurvivalCurve trivial({0.0, 2.0}, {1.0, 1.0}, {0.0, 0.0});
  SimulateOptions opts;
  opts.horizon = 2.0;
  opts.steps = 20;
  opts.particles = 200;
  opts.law = InitialLaw::point_mass(1.0);
  opts.seed = 5;
  opts.store_paths = true;
  const PathRecord frozen = simulate(opts, neg, StepMode::frozen(trivial));
  const PathRecord base = simulate(opts, neg, StepMode::baseline());
  for (std::size_t k = 0; k < frozen.trajectories.size(); ++k)
    for (std::size_t i = 0; i < opts.particles; ++i)
      CHECK(frozen.trajectories[k][i] == base.trajectories[k][i]);
}

TEST_CASE("simulation records are reproducible and well-formed") {
  SimulateOptions opts;
  opts.horizon = 5.0;
  opts.steps = 50;
  opts.particles = 400;
  opts.law = InitialLaw::exponential(1.0);
  opts.seed = 23;
  const PathRecord a = simulate(opts, kOu, StepMode::equilibrium());
  const PathRecord b = simulate(opts, kOu, StepMode::equilibrium());
  opts.seed = 24;
  const PathRecord c = simulate(opts, kOu, StepMode::equilibrium());

  REQUIRE(a.times.size() == opts.steps + 1);
  CHECK(a.times.front() == 0.0);
  CHECK(a.times.back() == doctest::Approx(5.0));
  CHECK(a.times[1] == doctest::Approx(0.1));
  CHECK(a.clip_events == 0);
  CHECK(a.particle_count == 400);

  bool identical = true;
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    CHECK(a.survival_fraction[k] == b.survival_fraction[k]);
    CHECK(a.empirical_c1[k] == b.empirical_c1[k]);
    CHECK(a.empirical_c1[k] >= 0.0);
    if (k > 0) CHECK(a.survival_fraction[k] <= a.survival_fraction[k - 1]);
    identical = identical && a.survival_fraction[k] == c.survival_fraction[k];
  }
  CHECK_FALSE(identical);

  // Mean reversion toward 1 keeps some particles alive but not all.
  CHECK(a.survival_fraction.back() > 0.1);
  CHECK(a.survival_fraction.back() < 1.0);
  CHECK(a.empirical_c1.front() > 0.0);
}

TEST_CASE("derived quantities read off a record") {
  PathRecord rec;
  rec.times = {0.0, 1.0};
  rec.survival_fraction = {1.0, 0.75};
  rec.empirical_c1 = {0.5, 0.25};
  rec.particle_count = 100;
  const std::vector<double> d = default_probability(rec);
  CHECK(d[0] == 0.0);
  CHECK(d[1] == doctest::Approx(0.25));
  const std::vector<double> se = survival_stderr(rec);
  CHECK(se[0] == 0.0);
  CHECK(se[1] == doctest::Approx(std::sqrt(0.75 * 0.25 / 100.0)));
  const SurvivalCurve curve = to_survival_curve(rec);
  CHECK(curve.survival_at(0.5) == doctest::Approx(0.75));
  CHECK(curve.holding_drift_at(0.0) == doctest::Approx(0.5));
}

TEST_CASE("smoothed runs converge to the absorbed run as the level grows") {
  SimulateOptions opts;
  opts.horizon = 2.0;
  opts.steps = 20;
  opts.particles = 500;
  opts.law = InitialLaw::exponential(1.0);
  opts.seed = 31;
  const PathRecord sharp = simulate(opts, kOu, StepMode::equilibrium());
  const PathRecord smooth = simulate_smoothed(10000, opts, kOu);
  REQUIRE(smooth.times.size() == sharp.times.size());
  double sup = 0.0;
  for (std::size_t k = 0; k < sharp.times.size(); ++k) {
    if (k > 0)
      CHECK(smooth.survival_fraction[k] <= smooth.survival_fraction[k - 1]);
    sup = std::max(sup, std::abs(smooth.survival_fraction[k] -
                                 sharp.survival_fraction[k]));
  }
  CHECK(sup < 0.05);
  CHECK_THROWS_AS(simulate_smoothed(0, opts, kOu), std::invalid_argument);
}
