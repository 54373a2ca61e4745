#pragma once

// Small statistics helpers shared by the experiment harnesses.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace hardedge {

/// Neumaier-compensated running sum; order dependent, so callers add terms in
/// a fixed index order.
template <typename T>
class CompensatedSum {
 public:
  void add(T x) {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_{};
  T comp_{};
};

// Complex sums compensate each component separately.
template <>
class CompensatedSum<std::complex<double>> {
 public:
  void add(std::complex<double> x) {
    re_.add(x.real());
    im_.add(x.imag());
  }
  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum<double> re_;
  CompensatedSum<double> im_;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for a binomial proportion (z = 1.96 by default).
Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z = 1.959963984540054);

/// Linear-interpolation quantile (type 7). Copies and sorts its input.
double quantile(std::span<const double> values, double q);
double median(std::span<const double> values);

double mean(std::span<const double> values);
/// Unbiased sample variance.
double variance(std::span<const double> values);
double skewness(std::span<const double> values);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope * x. Needs two distinct x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Kolmogorov distance between the empirical distribution of a sorted sample
/// and a continuous distribution function.
template <typename Cdf>
double ks_distance(std::span<const double> sorted, Cdf&& cdf) {
  const double n = static_cast<double>(sorted.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    worst = std::max(worst, std::max(above, below));
  }
  return worst;
}

}  // namespace hardedge
