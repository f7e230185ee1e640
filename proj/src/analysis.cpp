#include "mutualhold/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mutualhold {

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / 1.4142135623730950488016887242097);
}

double analytic_survival_bm(double x0, double drift, double vol, double t) {
  if (!(x0 > 0.0)) throw std::invalid_argument("start point must be positive");
  if (!(vol > 0.0)) throw std::invalid_argument("vol must be positive");
  if (!(t >= 0.0)) throw std::invalid_argument("time must be nonnegative");
  if (t == 0.0) return 1.0;
  const double s = vol * std::sqrt(t);
  return normal_cdf((x0 + drift * t) / s) -
         std::exp(-2.0 * drift * x0 / (vol * vol)) *
             normal_cdf((-x0 + drift * t) / s);
}

namespace {

// Empirical quantiles of a sorted sample at the midpoints (j + 1/2) / n.
std::vector<double> quantile_grid(const std::vector<double>& sorted,
                                  std::size_t n) {
  std::vector<double> out(n);
  const double m = static_cast<double>(sorted.size());
  for (std::size_t j = 0; j < n; ++j) {
    const double p = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
    auto idx = static_cast<std::size_t>(p * m);
    if (idx >= sorted.size()) idx = sorted.size() - 1;
    out[j] = sorted[idx];
  }
  return out;
}

}  // namespace

double wasserstein1(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("wasserstein1 needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a.size() != b.size()) {
    // Common refinement of the two quantile grids; exact when one sample
    // size divides the other, a documented approximation otherwise.
    const std::size_t n = std::max(a.size(), b.size());
    const std::size_t common =
        (n % std::min(a.size(), b.size()) == 0) ? n : 4 * n;
    a = quantile_grid(a, common);
    b = quantile_grid(b, common);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

CurveComparison compare_curves(const std::vector<double>& a,
                               const std::vector<double>& b,
                               const std::vector<double>& stderrs) {
  if (a.size() != b.size() || a.size() != stderrs.size())
    throw std::invalid_argument("compare_curves needs equal-length inputs");
  CurveComparison out;
  out.gap.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.gap[i] = a[i] - b[i];
    out.sup_gap = std::max(out.sup_gap, std::abs(out.gap[i]));
    if (std::abs(out.gap[i]) > 3.0 * stderrs[i]) out.flagged.push_back(i);
  }
  return out;
}

double regression_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("regression needs >= 2 paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("regression abscissae coincide");
  return sxy / sxx;
}

}  // namespace mutualhold
