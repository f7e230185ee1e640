#include "mutualhold/fixed_point.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "mutualhold/rng.hpp"

namespace mutualhold {

namespace {

// Draws are processed in fixed-size chunks whose partial sums are combined
// in chunk order; the reduction is bit-stable for any thread count.
constexpr std::size_t kChunkSize = 256;

struct ChunkAccumulator {
  std::vector<double> surv_sum;
  std::vector<double> surv_sq;
  std::vector<double> drift_sum;
  std::vector<double> drift_sq;

  explicit ChunkAccumulator(std::size_t grid_size)
      : surv_sum(grid_size, 0.0),
        surv_sq(grid_size, 0.0),
        drift_sum(grid_size, 0.0),
        drift_sq(grid_size, 0.0) {}
};

double bank_initial_draw(const InitialLaw& law, std::uint64_t seed,
                         std::uint64_t m, std::uint64_t salt) {
  switch (law.kind) {
    case InitialLaw::Kind::Exponential:
      return rng::exponential(seed, rng::kBankState, m, salt, law.param);
    case InitialLaw::Kind::PointMass:
      return law.param;
  }
  return law.param;
}

// Frozen-coefficient data laid out for the sweep's hot loops.
struct FrozenTable {
  const std::vector<double>& times;
  std::vector<double> survival;
  std::vector<double> holding;
  std::vector<double> inv_one_plus;  // 1 / (1 + survival)

  explicit FrozenTable(const SurvivalCurve& c)
      : times(c.times), survival(c.survival), holding(c.holding_drift) {
    inv_one_plus.resize(survival.size());
    for (std::size_t i = 0; i < survival.size(); ++i)
      inv_one_plus[i] = 1.0 / (1.0 + survival[i]);
  }
};

}  // namespace

std::vector<double> monotone_decreasing_projection(std::vector<double> values) {
  // Pool adjacent violators: maintain blocks with non-increasing means and
  // merge whenever a new block exceeds its predecessor.
  struct Block {
    double sum;
    std::size_t count;
  };
  std::vector<Block> blocks;
  blocks.reserve(values.size());
  for (const double v : values) {
    Block b{v, 1};
    while (!blocks.empty() &&
           blocks.back().sum * static_cast<double>(b.count) <
               b.sum * static_cast<double>(blocks.back().count)) {
      b.sum += blocks.back().sum;
      b.count += blocks.back().count;
      blocks.pop_back();
    }
    blocks.push_back(b);
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const Block& b : blocks) {
    const double mean = b.sum / static_cast<double>(b.count);
    out.insert(out.end(), b.count, mean);
  }
  return out;
}

MapResult apply_fixed_point_map(const SurvivalCurve& input,
                                const InitialLaw& law, const DriftVolSpec& spec,
                                const FixedPointOptions& opts,
                                std::uint64_t iterate_index) {
  const std::size_t grid_size = input.size();
  if (grid_size < 2)
    throw std::invalid_argument("fixed-point grid needs at least two times");
  if (opts.draws == 0) throw std::invalid_argument("need at least one draw");
  if (opts.forced_initial != nullptr && opts.forced_initial->size() < opts.draws)
    throw std::invalid_argument("forced initial draws shorter than draw count");
  const std::size_t steps = grid_size - 1;

  if (opts.monotone_projection) {
    for (std::size_t i = 1; i < grid_size; ++i)
      if (input.survival[i] > input.survival[i - 1] + 1e-9)
        throw std::invalid_argument("input survival must be non-increasing");
  }

  const FrozenTable table(input);
  const std::uint64_t noise_salt = opts.crn ? 0 : iterate_index;

  std::vector<double> dt(steps);
  std::vector<double> sq_dt(steps);
  std::vector<double> dsurv(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    dt[i] = table.times[i + 1] - table.times[i];
    sq_dt[i] = std::sqrt(dt[i]);
    dsurv[i] = table.survival[i + 1] - table.survival[i];
  }

  // Positive part of the frozen drift at grid index n and state x.
  const auto frozen_drift_plus = [&](std::size_t n, double x) {
    const double v = spec.drift_at(table.times[n], x) + table.holding[n];
    return v > 0.0 ? v * table.inv_one_plus[n] : 0.0;
  };

  const std::size_t chunk_count = (opts.draws + kChunkSize - 1) / kChunkSize;
  std::vector<ChunkAccumulator> chunks(chunk_count,
                                       ChunkAccumulator(grid_size));

  const auto sweep_chunk = [&](std::size_t c) {
    ChunkAccumulator& acc = chunks[c];
    const std::size_t m_begin = c * kChunkSize;
    const std::size_t m_end = std::min(opts.draws, m_begin + kChunkSize);
    // Restart path k lives in states[k]; states[steps] holds the path
    // started from the initial draw.
    std::vector<double> states(steps + 1);

    for (std::size_t m = m_begin; m < m_end; ++m) {
      double z = opts.forced_initial != nullptr
                     ? (*opts.forced_initial)[m]
                     : bank_initial_draw(law, opts.seed, m, noise_salt);
      states[steps] = z;

      if (z > 0.0) {
        acc.surv_sum[0] += 1.0;
        acc.surv_sq[0] += 1.0;
        const double bp = frozen_drift_plus(0, z);
        acc.drift_sum[0] += bp;
        acc.drift_sq[0] += bp * bp;
      }

      for (std::size_t i = 0; i < steps; ++i) {
        const double g =
            opts.zero_noise
                ? 0.0
                : rng::gaussian(opts.seed, rng::kBankGauss, m, i, noise_salt);
        states[i] = 0.0;  // restart path born at t_i from the origin

        // Advance the initial-draw path and every live restart path with the
        // same increment, coefficients frozen at the left endpoint t_i.
        const double t_left = table.times[i];
        const double c1_left = table.holding[i];
        const double inv_left = table.inv_one_plus[i];
        const auto advance = [&](double x) {
          const double v = spec.drift_at(t_left, x) + c1_left;
          double drift;
          double vol;
          if (v > 0.0) {
            drift = v * inv_left;
            vol = spec.vol_at(t_left, x) * inv_left;
          } else {
            drift = v;
            vol = spec.vol_at(t_left, x);
          }
          return x + drift * dt[i] + vol * sq_dt[i] * g;
        };
        states[steps] = advance(states[steps]);
        for (std::size_t k = 0; k <= i; ++k) states[k] = advance(states[k]);

        // Per-draw contributions at t_n combine the initial-draw indicator
        // with the restart indicators weighted by the survival increments.
        const std::size_t n = i + 1;
        double surv_contrib = 0.0;
        double drift_contrib = 0.0;
        if (states[steps] > 0.0) {
          surv_contrib += 1.0;
          drift_contrib += frozen_drift_plus(n, states[steps]);
        }
        for (std::size_t k = 0; k < n; ++k) {
          if (states[k] > 0.0) {
            surv_contrib += dsurv[k];
            drift_contrib += dsurv[k] * frozen_drift_plus(n, states[k]);
          }
        }
        acc.surv_sum[n] += surv_contrib;
        acc.surv_sq[n] += surv_contrib * surv_contrib;
        acc.drift_sum[n] += drift_contrib;
        acc.drift_sq[n] += drift_contrib * drift_contrib;
      }
    }
  };

  std::size_t thread_count = opts.threads;
  if (thread_count == 0)
    thread_count = std::max(1u, std::thread::hardware_concurrency());
  if (thread_count <= 1 || chunk_count <= 1) {
    for (std::size_t c = 0; c < chunk_count; ++c) sweep_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(thread_count);
    for (std::size_t w = 0; w < thread_count; ++w)
      workers.emplace_back([&]() {
        for (std::size_t c = next.fetch_add(1); c < chunk_count;
             c = next.fetch_add(1))
          sweep_chunk(c);
      });
    for (auto& w : workers) w.join();
  }

  // Ordered reduction of the chunk partials.
  std::vector<double> surv_sum(grid_size, 0.0);
  std::vector<double> surv_sq(grid_size, 0.0);
  std::vector<double> drift_sum(grid_size, 0.0);
  std::vector<double> drift_sq(grid_size, 0.0);
  for (const ChunkAccumulator& acc : chunks)
    for (std::size_t n = 0; n < grid_size; ++n) {
      surv_sum[n] += acc.surv_sum[n];
      surv_sq[n] += acc.surv_sq[n];
      drift_sum[n] += acc.drift_sum[n];
      drift_sq[n] += acc.drift_sq[n];
    }

  const double m_count = static_cast<double>(opts.draws);
  MapResult out;
  out.survival_se.resize(grid_size);
  out.drift_se.resize(grid_size);
  std::vector<double> surv(grid_size);
  std::vector<double> drift(grid_size);
  out.min_drift_estimate = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < grid_size; ++n) {
    surv[n] = surv_sum[n] / m_count;
    drift[n] = drift_sum[n] / m_count;
    out.min_drift_estimate = std::min(out.min_drift_estimate, drift[n]);
    if (opts.draws > 1) {
      const double var_s =
          std::max(surv_sq[n] - surv_sum[n] * surv_sum[n] / m_count, 0.0) /
          (m_count - 1.0);
      const double var_d =
          std::max(drift_sq[n] - drift_sum[n] * drift_sum[n] / m_count, 0.0) /
          (m_count - 1.0);
      out.survival_se[n] = std::sqrt(var_s / m_count);
      out.drift_se[n] = std::sqrt(var_d / m_count);
    }
    if (drift[n] < 0.0) drift[n] = 0.0;
  }

  out.max_increase = 0.0;
  for (std::size_t n = 1; n < grid_size; ++n)
    out.max_increase = std::max(out.max_increase, surv[n] - surv[n - 1]);

  if (opts.monotone_projection)
    surv = monotone_decreasing_projection(std::move(surv));
  for (double& s : surv) s = std::min(std::max(s, 1e-12), 1.0);

  if (opts.monotone_projection)
    out.curve = SurvivalCurve(table.times, std::move(surv), std::move(drift));
  else
    out.curve =
        SurvivalCurve::unchecked(table.times, std::move(surv), std::move(drift));
  return out;
}

IterateResult iterate_fixed_point(const SurvivalCurve& start,
                                  std::size_t max_iterates, double stop_tol,
                                  const InitialLaw& law,
                                  const DriftVolSpec& spec,
                                  const FixedPointOptions& opts,
                                  const IterateObserver& observer) {
  IterateResult out;
  out.curve = start;
  for (std::size_t k = 1; k <= max_iterates; ++k) {
    MapResult step = apply_fixed_point_map(out.curve, law, spec, opts, k);
    double delta = 0.0;
    for (std::size_t n = 0; n < step.curve.size(); ++n) {
      delta = std::max(delta,
                       std::abs(step.curve.survival[n] - out.curve.survival[n]));
      delta = std::max(delta, std::abs(step.curve.holding_drift[n] -
                                       out.curve.holding_drift[n]));
    }
    out.curve = std::move(step.curve);
    out.survival_se = std::move(step.survival_se);
    out.diagnostics.deltas.push_back(delta);
    out.diagnostics.iterations = k;
    if (observer) observer(k, out.curve, delta);
    if (stop_tol > 0.0 && delta < stop_tol) {
      out.diagnostics.converged = true;
      break;
    }
  }
  return out;
}

SurvivalCurve initial_curve(const std::vector<double>& grid,
                            const InitialLaw& law, const DriftVolSpec& spec,
                            const FixedPointOptions& opts) {
  if (opts.forced_initial != nullptr && opts.forced_initial->size() < opts.draws)
    throw std::invalid_argument("forced initial draws shorter than draw count");
  std::vector<double> draws(opts.draws);
  for (std::size_t m = 0; m < opts.draws; ++m)
    draws[m] = opts.forced_initial != nullptr
                   ? (*opts.forced_initial)[m]
                   : bank_initial_draw(law, opts.seed, m, 0);
  const double c1 =
      solve_holding_drift(0.0, WeightedMeasure::empirical(draws), spec);
  return SurvivalCurve(grid, std::vector<double>(grid.size(), 1.0),
                       std::vector<double>(grid.size(), c1));
}

FixedPointRun fixed_point_default_curve(double horizon, std::size_t steps,
                                        std::size_t max_iterates,
                                        double stop_tol, const InitialLaw& law,
                                        const DriftVolSpec& spec,
                                        const FixedPointOptions& opts,
                                        const IterateObserver& observer) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  if (steps == 0) throw std::invalid_argument("need at least one step");
  std::vector<double> grid(steps + 1);
  const double dt = horizon / static_cast<double>(steps);
  for (std::size_t k = 0; k <= steps; ++k)
    grid[k] = static_cast<double>(k) * dt;

  const SurvivalCurve start = initial_curve(grid, law, spec, opts);
  IterateResult res = iterate_fixed_point(start, max_iterates, stop_tol, law,
                                          spec, opts, observer);
  FixedPointRun run;
  run.default_probability.resize(res.curve.size());
  for (std::size_t n = 0; n < res.curve.size(); ++n)
    run.default_probability[n] = 1.0 - res.curve.survival[n];
  run.curve = std::move(res.curve);
  run.survival_se = std::move(res.survival_se);
  run.diagnostics = std::move(res.diagnostics);
  return run;
}

}  // namespace mutualhold
