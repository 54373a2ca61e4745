#pragma once

// Empirical Stieltjes transform, diagonal resolvent entries through the
// leave-one-out (Schur complement) formula, the per-column error terms of the
// self-consistent equation, and the Hilbert-Schmidt norm of the quadratic-form
// kernel.

#include <span>

#include "hardedge/ensemble.hpp"
#include "hardedge/mp_law.hpp"
#include "hardedge/spectral.hpp"

namespace hardedge {

/// (1/N) sum_a 1/(s_a - theta), compensated, in index order.
Complex empirical_stieltjes(std::span<const double> eigenvalues, const SpectralPoint& p);
Complex empirical_stieltjes(const SpectralDecomposition& d, const SpectralPoint& p);

/// w^*(W_k W_k^* - theta)^{-1} w expanded in the left singular basis of W_k,
/// including the null direction that contributes |<v_0, w>|^2 / (-theta).
Complex leave_one_out_quadratic_form(const MinorSpectrum& minor, const VectorXc& w,
                                     const SpectralPoint& p);

/// ((X^*X - theta)^{-1})_kk = -1 / (theta (1 + w_k^*(W_k W_k^* - theta)^{-1} w_k)).
Complex resolvent_diag_leave_one_out(const MatrixSample& m, Eigen::Index k,
                                     const SpectralPoint& p);
Complex resolvent_diag_leave_one_out(const MinorSpectrum& minor, const VectorXc& w_k,
                                     const SpectralPoint& p);

/// Schur-complement form 1/(|w_k|^2 - theta - w_k^* W_k (W_k^*W_k - theta)^{-1} W_k^* w_k),
/// evaluated with a dense LU solve.
Complex resolvent_diag_schur(const MatrixSample& m, Eigen::Index k, const SpectralPoint& p);

struct ResolventDiagonal {
  SpectralPoint theta;
  VectorXc values;  // G_kk

  Complex normalized_trace() const;
};

/// All G_kk via the leave-one-out formula (one minor SVD per column).
ResolventDiagonal resolvent_diagonal(const MatrixSample& m, const SpectralPoint& p);

/// All G_kk from the eigenvectors: sum_a |u_a(k)|^2 / (s_a - theta).
ResolventDiagonal resolvent_diagonal(const SpectralDecomposition& d, const SpectralPoint& p);

/// Deterministic constant for the trace-shift bound
/// sqrt(E) |(1/N) Tr G - (1/N) Tr (W_k W_k^* - theta)^{-1}| <= C sqrt(E) / (N eta).
inline constexpr double kTraceShiftConstant = 4.0;

struct ErrorTerms {
  SpectralPoint theta;
  VectorXc omegas;       // Omega_k = fluctuation_k + trace_shift_k
  VectorXc fluctuation;  // sqrt(E) (w_k^* R_k w_k - (1/N) Tr R_k), R_k = (W_k W_k^* - theta)^{-1}
  VectorXc trace_shift;  // sqrt(E) ((1/N) Tr R_k - (1/N) Tr G)
  double trace_shift_bound = 0.0;  // kTraceShiftConstant sqrt(E) / (N eta)

  double max_abs() const;
  bool trace_shift_within_bound() const;
};

/// Error terms from the full eigendecomposition (d must carry vectors), using
///   w_k^* R_k w_k = -1/(theta G_kk) - 1,
///   Tr (W_k^* W_k - theta)^{-1} = Tr G - (G^2)_kk / G_kk,
///   Tr R_k = -1/theta + Tr (W_k^* W_k - theta)^{-1}.
/// Throws std::invalid_argument unless E > 0 and eta > 0.
ErrorTerms omega_terms(const MatrixSample& m, const SpectralDecomposition& d,
                       const SpectralPoint& p);
ErrorTerms omega_terms(const MatrixSample& m, const SpectralPoint& p);

/// Same quantities computed column by column from the SVD of each W_k.
ErrorTerms omega_terms_leave_one_out(const MatrixSample& m, const SpectralPoint& p);

/// Default exponent b in the (log N)^b / N^2 edge of the lowest region.
inline constexpr double kDefaultLogPower = 4.5;

struct KernelStats {
  SpectralPoint theta;
  double trace_AA = 0.0;  // (E/N^2) sum_a 1/|s_a - theta|^2
  double low = 0.0;       // s <= min(low_edge, E/2)
  double middle = 0.0;    // min(low_edge, E/2) < s <= E/2
  double high = 0.0;      // s > E/2
  double low_edge = 0.0;  // (log N)^b / N^2
};

/// minor_eigenvalues are the eigenvalues of W_k^* W_k for an N x N sample.
KernelStats trace_kernel_norm(std::span<const double> minor_eigenvalues, Eigen::Index n,
                              const SpectralPoint& p, double log_power = kDefaultLogPower);

/// |delta + 1/(theta (delta + 1))|. Throws std::invalid_argument when delta is
/// within 1e-12 of -1.
double self_consistency_residual(Complex delta, const SpectralPoint& p);
double self_consistency_residual(const SpectralDecomposition& d, const SpectralPoint& p);

}  // namespace hardedge
