#include <doctest.h>

#include <cmath>

#include "hardedge/concentration.hpp"

using namespace hardedge;

TEST_CASE("identity kernel tail") {
  const auto kernel = QuadraticKernel::spectral(VectorXc::Ones(64));
  const TailCurve c = hw_tail_curve(kernel, {}, 10000, {8.0, 0.0, 4.0, 16.0}, 1);
  REQUIRE(c.deltas.size() == 4);
  CHECK(c.deltas.front() == 0.0);
  CHECK(c.exceedance.front() == 1.0);
  // delta = sqrt(N) = 8: the centred chi-square sum exceeds one standard deviation.
  CHECK(c.exceedance[2] > 0.1);
  CHECK(c.exceedance[2] < 0.5);
  for (std::size_t i = 1; i < c.exceedance.size(); ++i) {
    CHECK(c.exceedance[i] <= c.exceedance[i - 1]);
    CHECK(c.ci_lo[i] <= c.exceedance[i]);
    CHECK(c.ci_hi[i] >= c.exceedance[i]);
  }
  CHECK(c.normalizer == doctest::Approx(64.0));
  CHECK(c.slope > 0.0);
  CHECK(c.form_variance == doctest::Approx(64.0).epsilon(0.05));
}

TEST_CASE("dense and spectral kernels agree") {
  Eigen::VectorXcd lambda(3);
  lambda << 1.0, -2.0, Complex(0.5, 1.0);
  const MatrixXc u = MatrixXc::Identity(3, 3);
  const auto spectral = QuadraticKernel::spectral(lambda, u);
  const auto dense = QuadraticKernel::dense(lambda.asDiagonal());
  VectorXc x(3);
  x << Complex(1, 2), Complex(-0.5, 0.1), Complex(0.3, -0.7);
  CHECK(std::abs(spectral.centred_form(x) - dense.centred_form(x)) < 1e-14);
  CHECK(spectral.frobenius_squared() == doctest::Approx(dense.frobenius_squared()));
}

TEST_CASE("variance of the form for a non-identity spectrum") {
  Eigen::VectorXcd lambda(32);
  for (int i = 0; i < 32; ++i) lambda(i) = 1.0 / (1.0 + i);
  const auto kernel = QuadraticKernel::spectral(lambda);
  for (const char* name : {"complex-gaussian", "uniform-symmetric"}) {
    const auto d = parse_distribution(name);
    const TailCurve c = hw_tail_curve(kernel, d, 10000, {0.0, 1.0}, 3);
    INFO(name);
    CHECK(c.form_variance ==
          doctest::Approx(kernel.frobenius_squared() * d.modulus_square_variance()).epsilon(0.2));
  }
}

TEST_CASE("tail curve input validation") {
  const auto kernel = QuadraticKernel::spectral(VectorXc::Ones(4));
  CHECK_THROWS_AS(hw_tail_curve(kernel, {}, 99, {0.0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(hw_tail_curve(kernel, {}, 100, {-1.0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(hw_tail_curve(QuadraticKernel::spectral(VectorXc::Zero(4)), {}, 100, {0.0}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(QuadraticKernel::dense(MatrixXc(2, 3)), std::invalid_argument);
}

TEST_CASE("projection mass") {
  const EntryDistribution gauss{};
  // m = N: the full squared norm, a Gamma(64, 1) variable, almost never below 32.
  const auto full = projection_mass_probe(64, 64, gauss, 10000, 5);
  CHECK(full.probability < 1e-3);

  for (const char* name : {"complex-gaussian", "uniform-symmetric", "rademacher-pair"}) {
    const auto d = parse_distribution(name);
    ProjectionOptions o;
    o.family = ProjectionFamily::Coordinate;
    const auto r = projection_mass_probe(1, 16, d, 20000, 6, o);
    const double p = d.modulus_square_cdf(0.5);
    INFO(name);
    CHECK(std::abs(r.probability - p) <= 4.0 * std::sqrt(p * (1 - p) / 20000) + 1e-12);
  }

  // Tilted estimator against the exact Gamma(4, 1) distribution function at 2.
  ProjectionOptions tilted;
  tilted.estimator = ProjectionEstimator::Tilted;
  const auto t = projection_mass_probe(4, 64, gauss, 20000, 8, tilted);
  const double exact = 1.0 - std::exp(-2.0) * (1.0 + 2.0 + 2.0 + 4.0 / 3.0);
  CHECK(t.probability == doctest::Approx(exact).epsilon(0.03));
  CHECK(t.ci_lo <= exact);
  CHECK(t.ci_hi >= exact);

  // Haar frames for a non-gaussian law still give a probability in [0, 1].
  const auto haar = projection_mass_probe(4, 16, parse_distribution("uniform"), 2000, 9);
  CHECK(haar.family == ProjectionFamily::Haar);
  CHECK(haar.probability > 0.0);
  CHECK(haar.probability < 1.0);

  CHECK_THROWS_AS(projection_mass_probe(0, 4, gauss, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(projection_mass_probe(5, 4, gauss, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(projection_mass_probe(2, 4, parse_distribution("uniform"), 10, 1, tilted),
                  std::invalid_argument);
}
