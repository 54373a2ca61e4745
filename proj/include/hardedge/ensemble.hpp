#pragma once

// Square random matrices X_N = X / sqrt(N) with iid complex entries whose real
// and imaginary parts are independent, centred, and of variance 1/2.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "hardedge/rng.hpp"

namespace hardedge {

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

enum class EntryKind : std::uint32_t {
  ComplexGaussian = 0,
  RademacherPair = 1,
  UniformSymmetric = 2,
};

struct EntryDistribution {
  EntryKind kind = EntryKind::ComplexGaussian;
  /// Real entries with unit variance instead of complex ones. Accepted by the
  /// sampler; experiments flag such runs as exploratory.
  bool real_entries = false;

  std::string name() const;
  /// Real and imaginary parts have a bounded probability density.
  bool bounded_density() const;
  /// A delta_0 > 0 with E exp(delta_0 x^2) finite for one real part.
  /// Metadata only.
  double subgaussian_delta0() const;
  /// Var(|x|^2) for one complex entry.
  double modulus_square_variance() const;
  /// P(|x|^2 <= t) for one entry.
  double modulus_square_cdf(double t) const;

  /// Draws one real part (variance 1/2, or 1 for real entries).
  double draw_part(CounterRng& rng) const;
  std::complex<double> draw(CounterRng& rng) const;
};

/// Accepts "complex-gaussian", "rademacher-pair", "uniform-symmetric", with an
/// optional "real-" prefix. Throws std::invalid_argument otherwise.
EntryDistribution parse_distribution(std::string_view name);

struct EnsembleSpec {
  std::int64_t N = 1;
  EntryDistribution distribution{};
  std::uint64_t master_seed = 0;

  /// Throws std::invalid_argument on N < 1.
  void validate() const;
};

struct MatrixSample {
  MatrixXc entries;  // N x N, already scaled by 1/sqrt(N)
  EnsembleSpec spec;
  std::uint64_t trial_index = 0;

  Eigen::Index size() const { return entries.cols(); }
};

/// Entries are drawn column by column, top to bottom, real part first, from
/// the stream CounterRng(derive_trial_seed(master_seed, trial_index)).
MatrixSample sample_matrix(const EnsembleSpec& spec, std::uint64_t trial_index);

/// Wraps an explicit matrix (tests and injected fixtures).
MatrixSample make_sample(MatrixXc entries, std::uint64_t trial_index = 0);

/// W_k: the N x (N-1) matrix with column k removed. Indices are zero-based.
MatrixXc remove_column(const MatrixSample& m, Eigen::Index k);

/// w_k, the k-th column of X_N.
VectorXc column_vector(const MatrixSample& m, Eigen::Index k);

/// x_k = sqrt(N) w_k.
VectorXc raw_column(const MatrixSample& m, Eigen::Index k);

struct EntryStatistics {
  std::complex<double> mean;  // mean of the unscaled entries x_ij
  double second_moment = 0.0;  // mean of |x_ij|^2
  bool plausible = true;
};

/// Soft sanity check: |mean| <= 5/sqrt(2 N^2) and |second_moment - 1| <= 10/N.
/// Never throws; callers decide whether to log or fail.
EntryStatistics entry_statistics(const MatrixSample& m);

// Binary dump, little-endian:
//   u64 N | u32 kind | u64 master_seed | u64 trial_index
//   then N*N entries row-major, each as f64 re, f64 im (scaled values).
// kind is the EntryKind code, with bit 8 (0x100) set for real entries.
void write_sample(std::ostream& out, const MatrixSample& m);
MatrixSample read_sample(std::istream& in);

}  // namespace hardedge
