#include <doctest.h>

#include <cmath>

#include <Eigen/LU>

#include "hardedge/resolvent.hpp"

using namespace hardedge;

namespace {

// Oracle: dense inverse of X^*X - theta.
MatrixXc dense_resolvent(const MatrixSample& m, const SpectralPoint& p) {
  MatrixXc a = m.entries.adjoint() * m.entries;
  a.diagonal().array() -= p.theta();
  return a.fullPivLu().inverse();
}

}  // namespace

TEST_CASE("leave-one-out diagonal matches dense inversion") {
  for (std::uint64_t trial = 0; trial < 3; ++trial) {
    const MatrixSample m = sample_matrix(EnsembleSpec{16, {}, 8}, trial);
    for (auto [E, eta] : {std::pair{0.05, 0.01}, {1.0, 0.1}, {3.0, 1.0}}) {
      const SpectralPoint p = SpectralPoint::make(E, eta);
      const MatrixXc g = dense_resolvent(m, p);
      for (Eigen::Index k = 0; k < 16; ++k) {
        const Complex loo = resolvent_diag_leave_one_out(m, k, p);
        CHECK(std::abs(loo - g(k, k)) < 1e-10 * std::max(1.0, std::abs(g(k, k))));
        CHECK(std::abs(resolvent_diag_schur(m, k, p) - g(k, k)) <
              1e-10 * std::max(1.0, std::abs(g(k, k))));
      }
    }
  }
  const MatrixSample one = make_sample(MatrixXc::Constant(1, 1, Complex(0.0, 2.0)));
  const SpectralPoint p = SpectralPoint::make(1.0, 0.5);
  CHECK(std::abs(resolvent_diag_schur(one, 0, p) - 1.0 / (4.0 - p.theta())) < 1e-15);
}

TEST_CASE("spectral and leave-one-out diagonals agree with the trace") {
  const MatrixSample m = sample_matrix(EnsembleSpec{24, {}, 9}, 0);
  const SpectralDecomposition d = decompose(m, true);
  const SpectralPoint p = SpectralPoint::make(2.0, 0.1);
  const ResolventDiagonal a = resolvent_diagonal(m, p);
  const ResolventDiagonal b = resolvent_diagonal(d, p);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-11);
  CHECK(std::abs(a.normalized_trace() - empirical_stieltjes(d, p)) < 1e-12);
  CHECK(empirical_stieltjes(d, p).imag() > 0.0);
}

TEST_CASE("error terms: spectral route equals the column route") {
  const MatrixSample m = sample_matrix(EnsembleSpec{20, {}, 10}, 2);
  for (auto [E, eta] : {std::pair{0.1, 0.02}, {2.0, 0.1}}) {
    const SpectralPoint p = SpectralPoint::make(E, eta);
    const ErrorTerms fast = omega_terms(m, p);
    const ErrorTerms slow = omega_terms_leave_one_out(m, p);
    CHECK((fast.omegas - slow.omegas).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((fast.fluctuation + fast.trace_shift - fast.omegas).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(fast.trace_shift_within_bound());
    CHECK(fast.trace_shift_bound == doctest::Approx(4.0 * std::sqrt(E) / (20 * eta)));
    CHECK(fast.max_abs() >= 0.0);
  }
  CHECK_THROWS_AS(omega_terms(m, SpectralPoint::make(-1.0, 0.1)), std::invalid_argument);
}

TEST_CASE("self-consistent equation") {
  const SpectralPoint p = SpectralPoint::make(1.3, 0.2);
  CHECK(self_consistency_residual(mp_stieltjes(p), p) < 1e-13);
  CHECK_THROWS_AS(self_consistency_residual(Complex(-1.0, 0.0), p), std::invalid_argument);
  const MatrixSample m = sample_matrix(EnsembleSpec{256, {}, 3}, 0);
  CHECK(self_consistency_residual(decompose(m, false), SpectralPoint::make(2.0, 0.1)) < 0.1);
}

TEST_CASE("kernel norm regions") {
  const MatrixSample m = sample_matrix(EnsembleSpec{64, {}, 4}, 0);
  const MinorSpectrum minor = minor_spectrum(m, 0, false);
  const SpectralPoint p = SpectralPoint::make(0.8, 0.05);
  std::span<const double> eig(minor.eigenvalues.data(), 63);
  const KernelStats k = trace_kernel_norm(eig, 64, p);
  CHECK(k.low + k.middle + k.high == doctest::Approx(k.trace_AA).epsilon(1e-12));
  double direct = 0.0;
  for (double s : eig) direct += std::norm(1.0 / (s - p.theta()));
  CHECK(k.trace_AA == doctest::Approx(p.E / (64.0 * 64.0) * direct).epsilon(1e-12));
  CHECK(k.low_edge == doctest::Approx(std::pow(std::log(64.0), 4.5) / (64.0 * 64.0)));
}
