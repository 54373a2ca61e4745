#include <doctest.h>

#include <cmath>
#include <vector>

#include "hardedge/stats.hpp"

using namespace hardedge;

TEST_CASE("Wilson interval") {
  const Interval zero = wilson_interval(0, 10);
  CHECK(zero.lo == 0.0);
  CHECK(zero.hi == doctest::Approx(0.27753).epsilon(1e-4));
  const Interval all = wilson_interval(10, 10);
  CHECK(all.hi == 1.0);
  const Interval half = wilson_interval(50, 100);
  CHECK(half.lo == doctest::Approx(0.40383).epsilon(1e-4));
  CHECK(half.hi == doctest::Approx(0.59617).epsilon(1e-4));
}

TEST_CASE("order statistics and moments") {
  const std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  CHECK(median(v) == 2.5);
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 4.0);
  CHECK(quantile(v, 0.25) == doctest::Approx(1.75));
  CHECK(mean(v) == 2.5);
  CHECK(variance(v) == doctest::Approx(5.0 / 3.0));
  CHECK(skewness(v) == doctest::Approx(0.0));
  CHECK_THROWS(quantile(std::vector<double>{}, 0.5));
}

TEST_CASE("linear fit") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{3, 5, 7, 9};
  const LinearFit f = linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.points == 4);
}

TEST_CASE("compensated sums") {
  CompensatedSum<double> s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1.0);
  CompensatedSum<std::complex<double>> c;
  c.add({1e16, -1e16});
  c.add({1.0, 2.0});
  c.add({-1e16, 1e16});
  CHECK(c.value() == std::complex<double>(1.0, 2.0));
}

TEST_CASE("Kolmogorov distance") {
  const std::vector<double> v{0.1, 0.4, 0.7};
  const double d = ks_distance(std::span<const double>(v), [](double x) { return x; });
  CHECK(d == doctest::Approx(0.3));
}
