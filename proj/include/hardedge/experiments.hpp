#pragma once

// Monte Carlo harnesses, one per statement. Each draws its matrices from
// (master_seed, trial index) so a report depends only on the configuration,
// never on the thread count.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hardedge/config.hpp"
#include "hardedge/mp_law.hpp"
#include "hardedge/report.hpp"

namespace hardedge {

struct RunOptions {
  int threads = 1;  // parallelism hint only
};

/// Raised when a configuration is valid JSON but unusable for a given
/// experiment (for instance no admissible window, or an unbounded-density law
/// where one is required).
class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Windows used at size n: the explicit ones (a scale entry becomes
/// eta = scale sqrt(E) / n) or, when none are given, window_count windows with
/// E log-spaced over [(scale_min / (kappa n))^2, 4 - kappa] and
/// n eta / sqrt(E) = scale_min.
std::vector<Window> experiment_windows(const ExperimentConfig& cfg, std::int64_t n);

/// Spectral points used at size n: the explicit thetas, or the derived windows
/// read as E + i eta.
std::vector<SpectralPoint> experiment_points(const ExperimentConfig& cfg, std::int64_t n);

/// Lower spectral edges for the delocalization event: scale_min / (kappa n)^2
/// stands in for (ln n)^b / (kappa n)^2 and scale_min^2 / (kappa n)^2 for
/// (ln n)^{2b} / (kappa n)^2.
struct DelocEdges {
  double wide = 0.0;
  double narrow = 0.0;
};
DelocEdges deloc_edges(const ExperimentConfig& cfg, std::int64_t n);

/// Extended-real monotonicity: v nondecreasing, and strictly increasing at
/// every step whose left value is finite (+inf may repeat).
bool increasing_extended(const std::vector<double>& v);

TheoremReport run_apriori(const ExperimentConfig& cfg, const RunOptions& opts = {});
TheoremReport run_local_law(const ExperimentConfig& cfg, const RunOptions& opts = {});
TheoremReport run_delocalization(const ExperimentConfig& cfg, const RunOptions& opts = {});
TheoremReport run_wegner(const ExperimentConfig& cfg, const RunOptions& opts = {});
TheoremReport run_hard_edge_scaling(const ExperimentConfig& cfg, const RunOptions& opts = {});
TheoremReport run_hw(const ExperimentConfig& cfg, const RunOptions& opts = {});
TheoremReport run_projmass(const ExperimentConfig& cfg, const RunOptions& opts = {});
/// Exact identities on cfg.identity_samples samples for every size in cfg.sizes.
TheoremReport run_identities(const ExperimentConfig& cfg, const RunOptions& opts = {});

}  // namespace hardedge
