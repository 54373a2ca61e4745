#include "hardedge/stats.hpp"

#include <stdexcept>

namespace hardedge {

Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {successes <= 0 ? 0.0 : std::max(0.0, centre - half),
          successes >= trials ? 1.0 : std::min(1.0, centre + half)};
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

double median(std::span<const double> values) { return quantile(values, 0.5); }

double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of an empty sample");
  CompensatedSum<double> s;
  for (double x : values) s.add(x);
  return s.value() / static_cast<double>(values.size());
}

double variance(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("variance needs two values");
  const double m = mean(values);
  CompensatedSum<double> s;
  for (double x : values) s.add((x - m) * (x - m));
  return s.value() / static_cast<double>(values.size() - 1);
}

double skewness(std::span<const double> values) {
  if (values.size() < 3) throw std::invalid_argument("skewness needs three values");
  const double m = mean(values);
  CompensatedSum<double> m2, m3;
  for (double x : values) {
    const double d = x - m;
    m2.add(d * d);
    m3.add(d * d * d);
  }
  const double n = static_cast<double>(values.size());
  const double var = m2.value() / n;
  return (m3.value() / n) / std::pow(var, 1.5);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("linear_fit: need at least two paired points");
  }
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: x values are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.points = x.size();
  return fit;
}

}  // namespace hardedge
