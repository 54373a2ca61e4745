#include "hardedge/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/LU>

#include "hardedge/stats.hpp"

namespace hardedge {

namespace {

void require_upper(const SpectralPoint& p, const char* who) {
  if (!(p.eta > 0.0)) throw std::invalid_argument(std::string(who) + ": eta must be > 0");
}

void require_positive_energy(const SpectralPoint& p, const char* who) {
  require_upper(p, who);
  if (!(p.E > 0.0)) throw std::invalid_argument(std::string(who) + ": E must be > 0");
}

}  // namespace

Complex empirical_stieltjes(std::span<const double> eigenvalues, const SpectralPoint& p) {
  require_upper(p, "empirical_stieltjes");
  if (eigenvalues.empty()) throw std::invalid_argument("empirical_stieltjes: empty spectrum");
  const Complex theta = p.theta();
  CompensatedSum<Complex> sum;
  for (double s : eigenvalues) sum.add(1.0 / (s - theta));
  return sum.value() / static_cast<double>(eigenvalues.size());
}

Complex empirical_stieltjes(const SpectralDecomposition& d, const SpectralPoint& p) {
  return empirical_stieltjes({d.eigenvalues.data(), static_cast<std::size_t>(d.size())}, p);
}

Complex leave_one_out_quadratic_form(const MinorSpectrum& minor, const VectorXc& w,
                                     const SpectralPoint& p) {
  require_upper(p, "leave_one_out_quadratic_form");
  if (!minor.has_vectors()) {
    throw std::invalid_argument("leave_one_out_quadratic_form: minor lacks vectors");
  }
  const Complex theta = p.theta();
  CompensatedSum<Complex> sum;
  sum.add(std::norm(minor.left.col(0).dot(w)) / (-theta));
  for (Eigen::Index b = 0; b < minor.eigenvalues.size(); ++b) {
    sum.add(std::norm(minor.left.col(b + 1).dot(w)) / (minor.eigenvalues(b) - theta));
  }
  return sum.value();
}

Complex resolvent_diag_leave_one_out(const MinorSpectrum& minor, const VectorXc& w_k,
                                     const SpectralPoint& p) {
  const Complex q = leave_one_out_quadratic_form(minor, w_k, p);
  return -1.0 / (p.theta() * (1.0 + q));
}

Complex resolvent_diag_leave_one_out(const MatrixSample& m, Eigen::Index k,
                                     const SpectralPoint& p) {
  require_upper(p, "resolvent_diag_leave_one_out");
  return resolvent_diag_leave_one_out(minor_spectrum(m, k, true), column_vector(m, k), p);
}

Complex resolvent_diag_schur(const MatrixSample& m, Eigen::Index k, const SpectralPoint& p) {
  require_upper(p, "resolvent_diag_schur");
  const Complex theta = p.theta();
  const VectorXc w = column_vector(m, k);
  const double w2 = w.squaredNorm();
  if (m.size() == 1) return 1.0 / (w2 - theta);
  const MatrixXc wk = remove_column(m, k);
  const VectorXc b = wk.adjoint() * w;
  MatrixXc gram = wk.adjoint() * wk;
  gram.diagonal().array() -= theta;
  const VectorXc solved = gram.partialPivLu().solve(b);
  return 1.0 / (w2 - theta - b.dot(solved));
}

Complex ResolventDiagonal::normalized_trace() const {
  CompensatedSum<Complex> sum;
  for (Eigen::Index k = 0; k < values.size(); ++k) sum.add(values(k));
  return sum.value() / static_cast<double>(values.size());
}

ResolventDiagonal resolvent_diagonal(const MatrixSample& m, const SpectralPoint& p) {
  require_upper(p, "resolvent_diagonal");
  ResolventDiagonal out{p, VectorXc(m.size())};
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    out.values(k) = resolvent_diag_leave_one_out(m, k, p);
  }
  return out;
}

ResolventDiagonal resolvent_diagonal(const SpectralDecomposition& d, const SpectralPoint& p) {
  require_upper(p, "resolvent_diagonal");
  if (!d.has_vectors()) throw std::invalid_argument("resolvent_diagonal: decomposition lacks vectors");
  const Complex theta = p.theta();
  const Eigen::Index n = d.size();
  VectorXc inv(n);
  for (Eigen::Index a = 0; a < n; ++a) inv(a) = 1.0 / (d.eigenvalues(a) - theta);
  ResolventDiagonal out{p, VectorXc(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    CompensatedSum<Complex> sum;
    for (Eigen::Index a = 0; a < n; ++a) sum.add(std::norm(d.eigenvectors(k, a)) * inv(a));
    out.values(k) = sum.value();
  }
  return out;
}

double ErrorTerms::max_abs() const {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < omegas.size(); ++k) worst = std::max(worst, std::abs(omegas(k)));
  return worst;
}

bool ErrorTerms::trace_shift_within_bound() const {
  for (Eigen::Index k = 0; k < trace_shift.size(); ++k) {
    if (std::abs(trace_shift(k)) > trace_shift_bound) return false;
  }
  return true;
}

namespace {

ErrorTerms make_terms(const SpectralPoint& p, Eigen::Index n) {
  ErrorTerms out;
  out.theta = p;
  out.omegas.resize(n);
  out.fluctuation.resize(n);
  out.trace_shift.resize(n);
  out.trace_shift_bound =
      kTraceShiftConstant * std::sqrt(p.E) / (static_cast<double>(n) * p.eta);
  return out;
}

}  // namespace

ErrorTerms omega_terms(const MatrixSample& m, const SpectralDecomposition& d,
                       const SpectralPoint& p) {
  require_positive_energy(p, "omega_terms");
  if (!d.has_vectors()) throw std::invalid_argument("omega_terms: decomposition lacks vectors");
  const Complex theta = p.theta();
  const Eigen::Index n = d.size();
  const double nn = static_cast<double>(n);
  const double root_e = std::sqrt(p.E);

  VectorXc inv(n);
  CompensatedSum<Complex> trace;
  for (Eigen::Index a = 0; a < n; ++a) {
    inv(a) = 1.0 / (d.eigenvalues(a) - theta);
    trace.add(inv(a));
  }
  const Complex tr_full = trace.value();

  ErrorTerms out = make_terms(p, m.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    CompensatedSum<Complex> g, g2;
    for (Eigen::Index a = 0; a < n; ++a) {
      const double weight = std::norm(d.eigenvectors(k, a));
      g.add(weight * inv(a));
      g2.add(weight * inv(a) * inv(a));
    }
    const Complex gkk = g.value();
    const Complex quad = -1.0 / (theta * gkk) - 1.0;
    const Complex tr_minor = tr_full - g2.value() / gkk;
    const Complex tr_rk = (-1.0 / theta + tr_minor) / nn;
    out.fluctuation(k) = root_e * (quad - tr_rk);
    out.trace_shift(k) = root_e * (tr_rk - tr_full / nn);
    out.omegas(k) = out.fluctuation(k) + out.trace_shift(k);
  }
  return out;
}

ErrorTerms omega_terms(const MatrixSample& m, const SpectralPoint& p) {
  require_positive_energy(p, "omega_terms");
  return omega_terms(m, decompose(m, true), p);
}

ErrorTerms omega_terms_leave_one_out(const MatrixSample& m, const SpectralPoint& p) {
  require_positive_energy(p, "omega_terms_leave_one_out");
  const Complex theta = p.theta();
  const Eigen::Index n = m.size();
  const double nn = static_cast<double>(n);
  const double root_e = std::sqrt(p.E);
  const SpectralDecomposition d = decompose(m, false);
  const Complex tr_full = empirical_stieltjes(d, p) * nn;

  ErrorTerms out = make_terms(p, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const MinorSpectrum minor = minor_spectrum(m, k, true);
    const Complex quad = leave_one_out_quadratic_form(minor, column_vector(m, k), p);
    CompensatedSum<Complex> tr;
    tr.add(-1.0 / theta);
    for (Eigen::Index b = 0; b < minor.eigenvalues.size(); ++b) {
      tr.add(1.0 / (minor.eigenvalues(b) - theta));
    }
    const Complex tr_rk = tr.value() / nn;
    out.fluctuation(k) = root_e * (quad - tr_rk);
    out.trace_shift(k) = root_e * (tr_rk - tr_full / nn);
    out.omegas(k) = out.fluctuation(k) + out.trace_shift(k);
  }
  return out;
}

KernelStats trace_kernel_norm(std::span<const double> minor_eigenvalues, Eigen::Index n,
                              const SpectralPoint& p, double log_power) {
  require_positive_energy(p, "trace_kernel_norm");
  if (n < 1) throw std::invalid_argument("trace_kernel_norm: N must be >= 1");
  const double nn = static_cast<double>(n);
  const double scale = p.E / (nn * nn);
  KernelStats out;
  out.theta = p;
  out.low_edge = std::pow(std::log(nn), log_power) / (nn * nn);
  const double low_top = std::min(out.low_edge, 0.5 * p.E);
  const Complex theta = p.theta();
  CompensatedSum<double> total, low, middle, high;
  for (double s : minor_eigenvalues) {
    const double term = scale / std::norm(s - theta);
    total.add(term);
    if (s <= low_top) {
      low.add(term);
    } else if (s <= 0.5 * p.E) {
      middle.add(term);
    } else {
      high.add(term);
    }
  }
  out.trace_AA = total.value();
  out.low = low.value();
  out.middle = middle.value();
  out.high = high.value();
  return out;
}

double self_consistency_residual(Complex delta, const SpectralPoint& p) {
  require_upper(p, "self_consistency_residual");
  if (std::abs(delta + 1.0) < 1e-12) {
    throw std::invalid_argument("self_consistency_residual: Delta_N is within 1e-12 of -1");
  }
  return std::abs(delta + 1.0 / (p.theta() * (delta + 1.0)));
}

double self_consistency_residual(const SpectralDecomposition& d, const SpectralPoint& p) {
  return self_consistency_residual(empirical_stieltjes(d, p), p);
}

}  // namespace hardedge
