#pragma once

// Spectra of X_N^* X_N obtained from the singular value decomposition of X_N,
// together with minors, window counts, interlacing and the exact
// eigenvector-component identity.
//
// All indices are zero-based.

#include <cstdint>
#include <span>
#include <stdexcept>

#include <Eigen/Dense>

#include "hardedge/ensemble.hpp"
#include "hardedge/mp_law.hpp"

namespace hardedge {

class DecompositionError : public std::runtime_error {
 public:
  DecompositionError(const std::string& what, std::uint64_t trial_index, Eigen::Index n);

  std::uint64_t trial_index() const { return trial_index_; }
  Eigen::Index size() const { return size_; }

 private:
  std::uint64_t trial_index_;
  Eigen::Index size_;
};

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;  // s_0 <= s_1 <= ... (squared singular values)
  MatrixXc eigenvectors;        // column a is u_a; empty unless requested
  std::uint64_t trial_index = 0;

  Eigen::Index size() const { return eigenvalues.size(); }
  bool has_vectors() const { return eigenvectors.cols() == eigenvalues.size(); }
  double largest() const { return eigenvalues.size() ? eigenvalues(eigenvalues.size() - 1) : 0.0; }
};

/// Squared singular values of X (ascending) and, when requested, the right
/// singular vectors as eigenvectors of X^* X. Throws DecompositionError if the
/// SVD does not converge.
SpectralDecomposition decompose(const MatrixSample& m, bool with_vectors = true);

/// Spectral data of W_k, the sample with column k removed.
struct MinorSpectrum {
  Eigen::Index column = 0;
  Eigen::Index n = 0;           // size of the full matrix
  Eigen::VectorXd eigenvalues;  // N-1 ascending eigenvalues of W_k^* W_k
  /// N x N unitary. Column 0 spans the null direction of W_k W_k^*; column
  /// b + 1 is the left singular vector belonging to eigenvalues(b).
  MatrixXc left;
  /// (N-1) x (N-1); column b is the eigenvector of W_k^* W_k for eigenvalues(b).
  MatrixXc right;

  bool has_vectors() const { return left.cols() == n; }
};

MinorSpectrum minor_spectrum(const MatrixSample& m, Eigen::Index k, bool with_vectors = true);

struct CountResult {
  Window window;
  std::int64_t count = 0;
};

/// Number of eigenvalues in [E, E + eta], endpoints included.
CountResult count_in_window(const SpectralDecomposition& d, const Window& w);
std::int64_t count_in_range(std::span<const double> sorted, double lo, double hi);

/// 2 eta Im Tr (X^*X - E - i eta)^{-1}, an upper bound for the window count.
double counting_bound(const SpectralDecomposition& d, const Window& w);

/// Count of eigenvalues in [0, K/N^2]. Throws std::invalid_argument unless K > 0.
CountResult near_zero_count(const SpectralDecomposition& d, double K);

/// max_a max(s_a - t_a, t_a - s_{a+1}, 0) for a full spectrum s (length N)
/// and a minor spectrum t (length N-1), both ascending.
double interlacing_violation(std::span<const double> full, std::span<const double> minor);

/// Interlacing check for the principal minor obtained by deleting row and
/// column k of X^* X. Throws std::invalid_argument when N < 2.
double interlacing_check(const MatrixSample& m, const SpectralDecomposition& d, Eigen::Index k);

inline constexpr double kDefaultGapTolerance = 1e-6;

struct EigenvectorIdentity {
  double lhs = 0.0;       // |u_a(k)|^2
  double rhs = 0.0;       // 1 / (1 + (1/N) sum_b s_b |<v_b, x_k>|^2 / (s_a - s_b)^2)
  double residual = 0.0;  // |lhs - rhs|, zero when not covered
  double min_gap = 0.0;   // min_b |s_a - s^{(k)}_b|
  bool covered = true;
};

/// Compares the k-th component of the a-th eigenvector with its expression
/// through the spectrum of W_k. Skipped (covered = false) when s_a lies
/// within gap_tol (1 + s_max) of a minor eigenvalue. d must carry vectors.
EigenvectorIdentity eigenvector_identity_residual(const MatrixSample& m,
                                                  const SpectralDecomposition& d,
                                                  Eigen::Index alpha, Eigen::Index k,
                                                  double gap_tol = kDefaultGapTolerance);

EigenvectorIdentity eigenvector_identity_residual(const MatrixSample& m,
                                                  const SpectralDecomposition& d,
                                                  const MinorSpectrum& minor,
                                                  Eigen::Index alpha,
                                                  double gap_tol = kDefaultGapTolerance);

}  // namespace hardedge
