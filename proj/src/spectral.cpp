#include "hardedge/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "hardedge/stats.hpp"

namespace hardedge {

DecompositionError::DecompositionError(const std::string& what, std::uint64_t trial_index,
                                       Eigen::Index n)
    : std::runtime_error(what + " (trial " + std::to_string(trial_index) + ", N = " +
                         std::to_string(n) + ")"),
      trial_index_(trial_index),
      size_(n) {}

SpectralDecomposition decompose(const MatrixSample& m, bool with_vectors) {
  const Eigen::Index n = m.size();
  SpectralDecomposition d;
  d.trial_index = m.trial_index;
  if (!m.entries.allFinite()) {
    throw DecompositionError("decompose: non-finite matrix entries", m.trial_index, n);
  }
  const unsigned options = with_vectors ? static_cast<unsigned>(Eigen::ComputeThinV) : 0U;
  Eigen::BDCSVD<MatrixXc> svd(m.entries, options);
  if (svd.info() != Eigen::Success) {
    throw DecompositionError("decompose: SVD did not converge", m.trial_index, n);
  }
  // Eigen orders singular values descending; reverse to ascending eigenvalues.
  const Eigen::VectorXd& sigma = svd.singularValues();
  d.eigenvalues.resize(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const double s = sigma(n - 1 - a);
    d.eigenvalues(a) = s * s;
  }
  if (with_vectors) {
    d.eigenvectors = svd.matrixV().rowwise().reverse();
  }
  return d;
}

MinorSpectrum minor_spectrum(const MatrixSample& m, Eigen::Index k, bool with_vectors) {
  const MatrixXc w = remove_column(m, k);
  const Eigen::Index n = m.size();
  MinorSpectrum out;
  out.column = k;
  out.n = n;
  if (n == 1) {
    out.eigenvalues.resize(0);
    if (with_vectors) {
      out.left = MatrixXc::Identity(1, 1);
      out.right.resize(0, 0);
    }
    return out;
  }
  const unsigned options = with_vectors ? (Eigen::ComputeFullU | Eigen::ComputeFullV) : 0U;
  Eigen::BDCSVD<MatrixXc> svd(w, options);
  if (svd.info() != Eigen::Success) {
    throw DecompositionError("minor_spectrum: SVD did not converge", m.trial_index, n);
  }
  const Eigen::VectorXd& sigma = svd.singularValues();  // length N-1, descending
  const Eigen::Index r = n - 1;
  out.eigenvalues.resize(r);
  for (Eigen::Index b = 0; b < r; ++b) {
    const double s = sigma(r - 1 - b);
    out.eigenvalues(b) = s * s;
  }
  if (with_vectors) {
    const MatrixXc& u = svd.matrixU();  // N x N; last column spans the cokernel
    const MatrixXc& v = svd.matrixV();  // (N-1) x (N-1)
    out.left.resize(n, n);
    out.left.col(0) = u.col(n - 1);
    for (Eigen::Index b = 0; b < r; ++b) out.left.col(b + 1) = u.col(r - 1 - b);
    out.right = v.rowwise().reverse();
  }
  return out;
}

std::int64_t count_in_range(std::span<const double> sorted, double lo, double hi) {
  if (hi < lo) return 0;
  const auto first = std::lower_bound(sorted.begin(), sorted.end(), lo);
  const auto last = std::upper_bound(sorted.begin(), sorted.end(), hi);
  return static_cast<std::int64_t>(std::distance(first, last));
}

namespace {
std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
}  // namespace

CountResult count_in_window(const SpectralDecomposition& d, const Window& w) {
  return {w, count_in_range(as_span(d.eigenvalues), w.lower(), w.upper())};
}

double counting_bound(const SpectralDecomposition& d, const Window& w) {
  // eta Im 1/(s - E - i eta) = eta^2 / ((s - E)^2 + eta^2), at least 1/2 inside w.
  CompensatedSum<double> sum;
  for (Eigen::Index a = 0; a < d.size(); ++a) {
    const double x = d.eigenvalues(a) - w.E;
    sum.add(w.eta * w.eta / (x * x + w.eta * w.eta));
  }
  return 2.0 * sum.value();
}

CountResult near_zero_count(const SpectralDecomposition& d, double K) {
  if (!(K > 0.0)) throw std::invalid_argument("near_zero_count: K must be > 0");
  const double n = static_cast<double>(d.size());
  const Window w{0.0, K / (n * n)};
  return count_in_window(d, w);
}

double interlacing_violation(std::span<const double> full, std::span<const double> minor) {
  if (full.size() != minor.size() + 1) {
    throw std::invalid_argument("interlacing_violation: minor must have one eigenvalue fewer");
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < minor.size(); ++a) {
    worst = std::max({worst, full[a] - minor[a], minor[a] - full[a + 1]});
  }
  return worst;
}

double interlacing_check(const MatrixSample& m, const SpectralDecomposition& d, Eigen::Index k) {
  if (m.size() < 2) throw std::invalid_argument("interlacing_check: needs N >= 2");
  const MinorSpectrum minor = minor_spectrum(m, k, false);
  return interlacing_violation(as_span(d.eigenvalues), as_span(minor.eigenvalues));
}

EigenvectorIdentity eigenvector_identity_residual(const MatrixSample& m,
                                                  const SpectralDecomposition& d,
                                                  Eigen::Index alpha, Eigen::Index k,
                                                  double gap_tol) {
  return eigenvector_identity_residual(m, d, minor_spectrum(m, k, true), alpha, gap_tol);
}

EigenvectorIdentity eigenvector_identity_residual(const MatrixSample& m,
                                                  const SpectralDecomposition& d,
                                                  const MinorSpectrum& minor,
                                                  Eigen::Index alpha, double gap_tol) {
  if (!d.has_vectors()) {
    throw std::invalid_argument("eigenvector_identity_residual: decomposition lacks vectors");
  }
  if (!minor.has_vectors()) {
    throw std::invalid_argument("eigenvector_identity_residual: minor lacks vectors");
  }
  if (alpha < 0 || alpha >= d.size()) {
    throw std::out_of_range("eigenvector_identity_residual: alpha out of range");
  }
  if (!(gap_tol > 0.0)) {
    throw std::invalid_argument("eigenvector_identity_residual: gap_tol must be > 0");
  }
  const Eigen::Index k = minor.column;
  const double n = static_cast<double>(m.size());
  const double s_alpha = d.eigenvalues(alpha);

  EigenvectorIdentity out;
  out.lhs = std::norm(d.eigenvectors(k, alpha));
  out.min_gap = std::numeric_limits<double>::infinity();
  const VectorXc x = raw_column(m, k);
  CompensatedSum<double> sum;
  for (Eigen::Index b = 0; b < minor.eigenvalues.size(); ++b) {
    const double s_b = minor.eigenvalues(b);
    const double gap = s_alpha - s_b;
    out.min_gap = std::min(out.min_gap, std::abs(gap));
    const double overlap = std::norm(minor.left.col(b + 1).dot(x));
    sum.add(s_b * overlap / (gap * gap));
  }
  if (out.min_gap < gap_tol * (1.0 + d.largest())) {
    out.covered = false;
    out.rhs = 0.0;
    out.residual = 0.0;
    return out;
  }
  out.rhs = 1.0 / (1.0 + sum.value() / n);
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

}  // namespace hardedge
