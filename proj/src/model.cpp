#include "mutualhold/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mutualhold {

namespace {

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

// Shared bisection for the holding-drift equations.  Both the plain and the
// mollified variants solve F(y) = scale * y - integral(y) with F(0) <= 0,
// F strictly increasing (slope >= 1) and F(hi) >= 0; `hi` is the weighted
// integral of b^+ that also bounds the root from above.
template <typename F>
double bisect_root(F&& f, double hi, double tol) {
  if (hi <= 0.0) return 0.0;
  double lo = 0.0;
  double mid = 0.0;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double val = f(mid);
    if (std::abs(val) <= tol) return mid;
    if (val < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 0.25 * tol) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

// --- DriftSpec / VolSpec ----------------------------------------------------

DriftSpec DriftSpec::ornstein_uhlenbeck(double level) {
  DriftSpec d;
  d.family = Family::OrnsteinUhlenbeck;
  d.revert_level = level;
  return d;
}

DriftSpec DriftSpec::constant(double value) {
  DriftSpec d;
  d.family = Family::Constant;
  d.value = value;
  return d;
}

DriftSpec DriftSpec::affine(double slope, double intercept) {
  DriftSpec d;
  d.family = Family::AffineInX;
  d.slope = slope;
  d.intercept = intercept;
  return d;
}

double DriftSpec::operator()(double /*t*/, double x) const {
  switch (family) {
    case Family::OrnsteinUhlenbeck:
      return revert_level - x;
    case Family::Constant:
      return value;
    case Family::AffineInX:
      return slope * x + intercept;
  }
  return 0.0;
}

VolSpec VolSpec::constant(double value) {
  if (!(value > 0.0))
    throw std::invalid_argument("volatility must be strictly positive");
  VolSpec v;
  v.family = Family::Constant;
  v.value = value;
  return v;
}

VolSpec VolSpec::affine(double slope, double intercept, double floor) {
  if (!(floor > 0.0))
    throw std::invalid_argument("volatility floor must be strictly positive");
  VolSpec v;
  v.family = Family::AffineInX;
  v.slope = slope;
  v.intercept = intercept;
  v.floor = floor;
  return v;
}

double VolSpec::operator()(double /*t*/, double x) const {
  switch (family) {
    case Family::Constant:
      return value;
    case Family::AffineInX:
      return std::max(slope * x + intercept, floor);
  }
  return value;
}

DriftVolSpec::DriftVolSpec(DriftSpec d, VolSpec v, SignRegime r)
    : drift(d), vol(v), regime(r) {
  // Reject declarations that are provably wrong on the state domain x >= 0.
  const bool checkable = drift.family != DriftSpec::Family::OrnsteinUhlenbeck;
  if (!checkable) {
    if (regime == SignRegime::Positive)
      throw std::invalid_argument(
          "mean-reverting drift changes sign on x >= 0");
    if (regime == SignRegime::NonPositive && drift.revert_level > 0.0)
      throw std::invalid_argument(
          "mean-reverting drift with positive level changes sign");
    return;
  }
  const double at_zero = drift(0.0, 0.0);
  const double slope =
      drift.family == DriftSpec::Family::AffineInX ? drift.slope : 0.0;
  if (regime == SignRegime::NonPositive && (at_zero > 0.0 || slope > 0.0))
    throw std::invalid_argument("drift is not nonpositive on x >= 0");
  if (regime == SignRegime::Positive && (at_zero < 0.0 || slope < 0.0))
    throw std::invalid_argument("drift is not nonnegative on x >= 0");
}

// --- WeightedMeasure ---------------------------------------------------------

WeightedMeasure::WeightedMeasure(std::vector<double> positions,
                                 std::vector<double> weights)
    : positions_(std::move(positions)), weights_(std::move(weights)) {
  if (positions_.size() != weights_.size())
    throw std::invalid_argument("measure atom/weight count mismatch");
  double total = 0.0;
  double alive = 0.0;
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    if (!(positions_[i] >= 0.0))
      throw std::invalid_argument("measure atom at negative position");
    if (!(weights_[i] > 0.0))
      throw std::invalid_argument("measure weight must be strictly positive");
    total += weights_[i];
    if (positions_[i] > 0.0) alive += weights_[i];
  }
  total_mass_ = total;
  alive_mass_ = alive;
}

WeightedMeasure WeightedMeasure::empirical(
    const std::vector<double>& positions) {
  if (positions.empty())
    throw std::invalid_argument("empirical measure needs at least one atom");
  std::vector<double> weights(positions.size(),
                              1.0 / static_cast<double>(positions.size()));
  return WeightedMeasure(positions, std::move(weights));
}

WeightedMeasure WeightedMeasure::point_mass(double position, double weight) {
  return WeightedMeasure({position}, {weight});
}

// --- SurvivalCurve -----------------------------------------------------------

SurvivalCurve::SurvivalCurve(std::vector<double> t, std::vector<double> surv,
                             std::vector<double> drift)
    : times(std::move(t)),
      survival(std::move(surv)),
      holding_drift(std::move(drift)) {
  if (times.empty() || survival.size() != times.size() ||
      holding_drift.size() != times.size())
    throw std::invalid_argument("curve arrays must share a nonempty grid");
  if (times.front() != 0.0)
    throw std::invalid_argument("curve grid must start at time 0");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1]))
      throw std::invalid_argument("curve grid must be strictly increasing");
    if (!(survival[i] > 0.0) || survival[i] > 1.0 + 1e-12)
      throw std::invalid_argument("survival values must lie in (0, 1]");
    if (i > 0 && survival[i] > survival[i - 1] + 1e-9)
      throw std::invalid_argument("survival values must be non-increasing");
    if (survival[i] > 1.0) survival[i] = 1.0;
    if (!(holding_drift[i] >= 0.0))
      throw std::invalid_argument("holding drift must be nonnegative");
  }
}

SurvivalCurve SurvivalCurve::unchecked(std::vector<double> t,
                                       std::vector<double> surv,
                                       std::vector<double> drift) {
  SurvivalCurve c;
  c.times = std::move(t);
  c.survival = std::move(surv);
  c.holding_drift = std::move(drift);
  for (double& s : c.survival) s = std::min(std::max(s, 1e-12), 1.0);
  for (double& d : c.holding_drift) d = std::max(d, 0.0);
  return c;
}

std::size_t SurvivalCurve::index_at(double t) const {
  if (t <= times.front()) return 0;
  if (t > times.back()) {
    if (t <= times.back() * (1.0 + 1e-12) + 1e-12) return times.size() - 1;
    throw std::out_of_range("curve lookup beyond horizon");
  }
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  return static_cast<std::size_t>(it - times.begin());
}

double SurvivalCurve::survival_at(double t) const {
  return survival[index_at(t)];
}

double SurvivalCurve::holding_drift_at(double t) const {
  return holding_drift[index_at(t)];
}

// --- Equilibrium coefficients ------------------------------------------------

double solve_holding_drift(double t, const WeightedMeasure& m,
                           const DriftVolSpec& spec, double tol) {
  const auto& xs = m.positions();
  const auto& ws = m.weights();
  const double alive = m.alive_mass();
  if (alive <= 0.0) return 0.0;

  // Drift values over the alive atoms, computed once for the whole search.
  std::vector<double> wv;
  std::vector<double> bv;
  wv.reserve(xs.size());
  bv.reserve(xs.size());
  double hi = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0)) continue;
    const double b = spec.drift_at(t, xs[i]);
    wv.push_back(ws[i]);
    bv.push_back(b);
    hi += ws[i] * positive_part(b);
  }

  const auto objective = [&](double y) {
    double integral = 0.0;
    for (std::size_t i = 0; i < wv.size(); ++i)
      integral += wv[i] * positive_part(bv[i] + y);
    return (1.0 + alive) * y - integral;
  };
  return bisect_root(objective, hi, tol);
}

double transformed_drift(double drift_val, double holding_drift, double mass) {
  const double v = drift_val + holding_drift;
  return v > 0.0 ? v / (1.0 + mass) : v;
}

double transformed_vol(double vol_val, double transformed_drift_val,
                       double mass) {
  return transformed_drift_val > 0.0 ? vol_val / (1.0 + mass) : vol_val;
}

double equilibrium_drift(double t, double x, const WeightedMeasure& m,
                         const DriftVolSpec& spec) {
  const double c1 = solve_holding_drift(t, m, spec);
  return transformed_drift(spec.drift_at(t, x), c1, m.alive_mass());
}

double equilibrium_vol(double t, double x, const WeightedMeasure& m,
                       const DriftVolSpec& spec) {
  const double c1 = solve_holding_drift(t, m, spec);
  const double b = transformed_drift(spec.drift_at(t, x), c1, m.alive_mass());
  return transformed_vol(spec.vol_at(t, x), b, m.alive_mass());
}

double equilibrium_strategy(double t, double y, const WeightedMeasure& m,
                            const DriftVolSpec& spec) {
  return equilibrium_drift(t, y, m, spec) > 0.0 ? 1.0 : 0.0;
}

// --- Smoothed system ----------------------------------------------------------

double smoothed_heaviside(int level, double x) {
  if (level <= 0) throw std::invalid_argument("smoothing level must be >= 1");
  if (x <= 0.0) return 0.0;
  return std::exp(-1.0 / (static_cast<double>(level) * x));
}

double solve_smoothed_holding_drift(int level, double t,
                                    const WeightedMeasure& m,
                                    const DriftVolSpec& spec, double tol) {
  const auto& xs = m.positions();
  const auto& ws = m.weights();

  // Pre-mollified weights and drift values; atoms with zero weight drop out.
  std::vector<double> hw;
  std::vector<double> bv;
  hw.reserve(xs.size());
  bv.reserve(xs.size());
  double mass = 0.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double h = smoothed_heaviside(level, xs[i]);
    if (h <= 0.0) continue;
    const double b = spec.drift_at(t, xs[i]);
    hw.push_back(ws[i] * h);
    bv.push_back(b);
    mass += ws[i] * h;
    hi += ws[i] * h * positive_part(b);
  }
  if (mass <= 0.0) return 0.0;

  const auto objective = [&](double y) {
    double integral = 0.0;
    for (std::size_t i = 0; i < hw.size(); ++i)
      integral += hw[i] * positive_part(bv[i] + y);
    return (1.0 + mass) * y - integral;
  };
  return bisect_root(objective, hi, tol);
}

SmoothedCoefficients smoothed_coefficients(int level, double t, double x,
                                           const WeightedMeasure& m,
                                           const DriftVolSpec& spec) {
  SmoothedCoefficients out;
  const auto& xs = m.positions();
  const auto& ws = m.weights();
  for (std::size_t i = 0; i < xs.size(); ++i)
    out.mollified_mass += ws[i] * smoothed_heaviside(level, xs[i]);
  out.holding_drift = solve_smoothed_holding_drift(level, t, m, spec);

  const double v = spec.drift_at(t, x) + out.holding_drift;
  out.drift = v > 0.0 ? v / (1.0 + out.mollified_mass) : v;
  out.vol = spec.vol_at(t, x) /
            (1.0 + out.mollified_mass * smoothed_heaviside(level, out.drift));
  return out;
}

// --- Frozen coefficients -------------------------------------------------------

FrozenCoefficients frozen_coefficients(double t, double x,
                                       const SurvivalCurve& curve,
                                       const DriftVolSpec& spec) {
  const std::size_t idx = curve.index_at(t);
  const double mass = curve.survival[idx];
  const double c1 = curve.holding_drift[idx];
  FrozenCoefficients out;
  out.drift = transformed_drift(spec.drift_at(t, x), c1, mass);
  out.vol = transformed_vol(spec.vol_at(t, x), out.drift, mass);
  return out;
}

}  // namespace mutualhold
