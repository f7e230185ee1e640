#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mutualhold {

// ---------------------------------------------------------------------------
// Model primitives: the idiosyncratic drift/volatility pair (b, sigma), the
// weighted measures it is integrated against, and the survival/holding-drift
// curves used when the interaction is frozen in time.
// ---------------------------------------------------------------------------

enum class SignRegime { NonPositive, Positive, SignChanging };

// Idiosyncratic drift b(t, x).  All families are time-homogeneous and
// measure-free; evaluation happens on the state domain x >= 0.
struct DriftSpec {
  enum class Family { OrnsteinUhlenbeck, Constant, AffineInX };

  Family family = Family::Constant;
  double revert_level = 0.0;  // OrnsteinUhlenbeck: b(x) = revert_level - x
  double value = 0.0;         // Constant: b(x) = value
  double slope = 0.0;         // AffineInX: b(x) = slope * x + intercept
  double intercept = 0.0;

  static DriftSpec ornstein_uhlenbeck(double level);
  static DriftSpec constant(double value);
  static DriftSpec affine(double slope, double intercept);

  double operator()(double t, double x) const;
};

// Volatility sigma(t, x); bounded below by a strictly positive floor.
struct VolSpec {
  enum class Family { Constant, AffineInX };

  Family family = Family::Constant;
  double value = 1.0;  // Constant
  double slope = 0.0;  // AffineInX: max(slope * x + intercept, floor)
  double intercept = 0.0;
  double floor = 1e-8;

  static VolSpec constant(double value);
  static VolSpec affine(double slope, double intercept, double floor);

  double operator()(double t, double x) const;
};

// The full model input.  The declared sign regime is validated against the
// drift family where that is decidable (affine coefficients on x >= 0).
struct DriftVolSpec {
  DriftSpec drift;
  VolSpec vol;
  SignRegime regime = SignRegime::SignChanging;

  DriftVolSpec() = default;
  DriftVolSpec(DriftSpec d, VolSpec v, SignRegime r);

  double drift_at(double t, double x) const { return drift(t, x); }
  double vol_at(double t, double x) const { return vol(t, x); }
};

// Finite weighted measure on [0, infinity).  Atoms at exactly zero represent
// defaulted states; they carry weight but no "alive" mass.
class WeightedMeasure {
 public:
  WeightedMeasure() = default;
  WeightedMeasure(std::vector<double> positions, std::vector<double> weights);

  // Equal-weight empirical measure: weight 1/n per atom.
  static WeightedMeasure empirical(const std::vector<double>& positions);
  static WeightedMeasure point_mass(double position, double weight = 1.0);

  std::size_t size() const { return positions_.size(); }
  const std::vector<double>& positions() const { return positions_; }
  const std::vector<double>& weights() const { return weights_; }
  double total_mass() const { return total_mass_; }
  // Mass strictly above the origin.
  double alive_mass() const { return alive_mass_; }

 private:
  std::vector<double> positions_;
  std::vector<double> weights_;
  double total_mass_ = 0.0;
  double alive_mass_ = 0.0;
};

// Survival probability and aggregate holding drift on a fixed time grid,
// interpreted as piecewise-constant and left-continuous between grid points.
// survival lives in (0, 1] and never increases; holding_drift is nonnegative.
struct SurvivalCurve {
  std::vector<double> times;
  std::vector<double> survival;
  std::vector<double> holding_drift;

  SurvivalCurve() = default;
  SurvivalCurve(std::vector<double> t, std::vector<double> surv,
                std::vector<double> drift);

  // Skips the monotonicity check (values are still range-clamped); used for
  // raw Monte-Carlo estimates when the isotonic projection is disabled.
  static SurvivalCurve unchecked(std::vector<double> t,
                                 std::vector<double> surv,
                                 std::vector<double> drift);

  std::size_t size() const { return times.size(); }
  double horizon() const { return times.empty() ? 0.0 : times.back(); }
  double survival_at(double t) const;
  double holding_drift_at(double t) const;
  // Largest grid index i with times[i] >= t (left-continuous lookup).
  std::size_t index_at(double t) const;
};

// ---------------------------------------------------------------------------
// Equilibrium coefficients.
//
// The aggregate holding drift c1 = c1(t, m) is the unique root of
//   F(y) = (1 + m({x > 0})) y - sum_{x_i > 0} w_i (b(t, x_i) + y)^+ ,
// which satisfies F(0) <= 0, is strictly increasing with slope >= 1, and has
// its root in [0, sum_{x_i > 0} w_i b(t, x_i)^+].  Given c1 and the alive
// mass a, the transformed coefficients are
//   drift: (b + c1)^+ / (1 + a) - (b + c1)^-,
//   vol:   sigma / (1 + a * 1{drift > 0})       (ties at 0 take the plain vol).
// ---------------------------------------------------------------------------

inline constexpr double kHoldingDriftTol = 1e-12;

// Root of F above; absolute tolerance on F itself.
double solve_holding_drift(double t, const WeightedMeasure& m,
                           const DriftVolSpec& spec,
                           double tol = kHoldingDriftTol);

// Algebraic cores, reused wherever (c1, mass) pairs come from other sources
// (frozen curves, smoothed measures, per-step particle summaries).
double transformed_drift(double drift_val, double holding_drift, double mass);
double transformed_vol(double vol_val, double transformed_drift_val,
                       double mass);

double equilibrium_drift(double t, double x, const WeightedMeasure& m,
                         const DriftVolSpec& spec);
double equilibrium_vol(double t, double x, const WeightedMeasure& m,
                       const DriftVolSpec& spec);

// Indicator strategy: hold counterparty y exactly when its transformed drift
// is strictly positive.
double equilibrium_strategy(double t, double y, const WeightedMeasure& m,
                            const DriftVolSpec& spec);

// ---------------------------------------------------------------------------
// Smoothed system.  The hard alive indicator is replaced by the mollifier
//   H_n(x) = exp(-1 / (n x)) for x > 0, 0 otherwise,
// the measure mass a by m(H_n), and the vol indicator by H_n(drift).
// ---------------------------------------------------------------------------

double smoothed_heaviside(int level, double x);

struct SmoothedCoefficients {
  double holding_drift = 0.0;  // root of the mollified fixed-point equation
  double mollified_mass = 0.0; // m(H_n)
  double drift = 0.0;
  double vol = 0.0;
};

double solve_smoothed_holding_drift(int level, double t,
                                    const WeightedMeasure& m,
                                    const DriftVolSpec& spec,
                                    double tol = kHoldingDriftTol);

SmoothedCoefficients smoothed_coefficients(int level, double t, double x,
                                           const WeightedMeasure& m,
                                           const DriftVolSpec& spec);

// ---------------------------------------------------------------------------
// Frozen coefficients: the same transformation with (survival, holding_drift)
// read off a curve instead of a measure.  Lookup beyond the curve horizon is
// an error.
// ---------------------------------------------------------------------------

struct FrozenCoefficients {
  double drift = 0.0;
  double vol = 0.0;
};

FrozenCoefficients frozen_coefficients(double t, double x,
                                       const SurvivalCurve& curve,
                                       const DriftVolSpec& spec);

}  // namespace mutualhold
