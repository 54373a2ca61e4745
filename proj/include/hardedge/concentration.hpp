#pragma once

// Monte Carlo probes of the two concentration inputs: tails of centred
// quadratic forms sum_ij a_ij (x_i conj(x_j) - E x_i conj(x_j)), and the
// lower tail of the mass of a random vector on an m-dimensional subspace.

#include <cstdint>
#include <string>
#include <vector>

#include "hardedge/ensemble.hpp"
#include "hardedge/mp_law.hpp"

namespace hardedge {

/// A = U diag(lambda) U^H given either densely or through its spectral data.
class QuadraticKernel {
 public:
  static QuadraticKernel dense(MatrixXc a);
  /// An empty basis stands for the identity.
  static QuadraticKernel spectral(VectorXc eigenvalues, MatrixXc basis = {});

  Eigen::Index size() const;
  /// Tr A^* A.
  double frobenius_squared() const;
  Complex trace() const;
  /// sum_ij a_ij x_i conj(x_j) - Tr A for a vector with E|x_i|^2 = 1.
  Complex centred_form(const VectorXc& x) const;

 private:
  bool dense_ = true;
  MatrixXc matrix_;
  VectorXc eigenvalues_;
  MatrixXc basis_;
};

struct TailCurve {
  std::vector<double> deltas;
  std::vector<double> exceedance;
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;
  std::int64_t trials = 0;
  double normalizer = 0.0;  // Tr A^* A
  // Least squares -log(exceedance) = intercept + slope * min(d/sqrt(T), d^2/T)
  // over points with 0 < exceedance.
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t fit_points = 0;
  double form_mean_re = 0.0;
  double form_variance = 0.0;  // sample variance of the centred form (|.|^2 sense)
};

/// Throws std::invalid_argument when trials < 100, Tr A^* A = 0, or a delta
/// is negative. Deltas are reported in ascending order.
TailCurve hw_tail_curve(const QuadraticKernel& a, const EntryDistribution& dist,
                        std::int64_t trials, std::vector<double> deltas, std::uint64_t seed,
                        int threads = 1);

enum class ProjectionFamily { Automatic, Coordinate, Haar };
enum class ProjectionEstimator { Plain, Tilted };

struct ProjectionOptions {
  /// Automatic picks coordinate vectors for complex-gaussian entries (whose
  /// law is unitarily invariant) and a fresh Haar frame per trial otherwise.
  ProjectionFamily family = ProjectionFamily::Automatic;
  /// Tilted: importance sampling from the complex gaussian with E|x|^2 = 1/2,
  /// weight 2^{-m} exp(sum |x_i|^2). Complex-gaussian entries only.
  ProjectionEstimator estimator = ProjectionEstimator::Plain;
  int threads = 1;
};

struct ProjectionMassResult {
  std::int64_t m = 0;
  std::int64_t n = 0;
  std::int64_t trials = 0;
  std::int64_t hits = 0;  // trials on the event (unweighted)
  double probability = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 1.0;
  ProjectionFamily family = ProjectionFamily::Coordinate;
  ProjectionEstimator estimator = ProjectionEstimator::Plain;
};

/// Empirical P(sum_{a<m} |<v_a, x>|^2 <= m/2). Throws std::invalid_argument
/// unless 1 <= m <= n and trials >= 1.
ProjectionMassResult projection_mass_probe(std::int64_t m, std::int64_t n,
                                           const EntryDistribution& dist, std::int64_t trials,
                                           std::uint64_t seed, const ProjectionOptions& options = {});

std::string to_string(ProjectionFamily f);
std::string to_string(ProjectionEstimator e);

}  // namespace hardedge
