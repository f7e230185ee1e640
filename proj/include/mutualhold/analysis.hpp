#pragma once

#include <cstddef>
#include <vector>

namespace mutualhold {

// Standard normal distribution function, accurate to machine precision.
double normal_cdf(double x);

// Survival of a drifted Brownian motion started at x0 > 0 and killed at the
// origin:  P[ min_{s <= t} (x0 + b s + sigma W_s) > 0 ]
//        = Phi((x0 + b t) / (sigma sqrt(t)))
//          - exp(-2 b x0 / sigma^2) Phi((-x0 + b t) / (sigma sqrt(t))).
// Serves as the closed-form oracle for constant-coefficient simulations.
double analytic_survival_bm(double x0, double drift, double vol, double t);

// Wasserstein-1 distance between two empirical samples on the line: the mean
// absolute difference of order statistics.  Samples of unequal size are
// resampled onto a common quantile grid (exact when one size divides the
// other).  Empty samples are rejected.
double wasserstein1(std::vector<double> a, std::vector<double> b);

// Pointwise comparison of two curves on a shared grid.
struct CurveComparison {
  std::vector<double> gap;       // a - b per grid point
  double sup_gap = 0.0;          // max |a - b|
  std::vector<std::size_t> flagged;  // indices where |gap| > 3 * stderr
};

CurveComparison compare_curves(const std::vector<double>& a,
                               const std::vector<double>& b,
                               const std::vector<double>& stderrs);

// Ordinary least-squares slope of y against x.
double regression_slope(const std::vector<double>& x,
                        const std::vector<double>& y);

}  // namespace mutualhold
