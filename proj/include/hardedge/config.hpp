#pragma once

// Experiment configuration and its JSON form.
//
// Keys (all optional, unknown keys rejected):
//   sizes              [int]      matrix sizes N                      [128]
//   trials             int >= 30  Monte Carlo trials per size          100
//   distribution       string     entry law                            "complex-gaussian"
//   b                  real > 0   log power, report metadata           4.5
//   kappa              real (0,1) distance from the soft edge          0.5
//   scale_min          real > 0   window scale N eta / sqrt(E)         50
//   window_count       int >= 1   derived windows per size             6
//   windows            [{E, eta} | {E, scale}]  explicit windows       []
//   thetas             [{E, eta}] explicit spectral points             []
//   epsilon_grid       [real > 0]                                      [0.05, 0.1, 0.15, 0.2]
//   K_grid             [real > 0]                                      [1, 2, 4, 8]
//   L_grid             [int >= 1]                                      [1, 2, 3, 4, 5]
//   seed               uint64     master seed                          0
//   identity_samples   int >= 1   samples for the identity suite       20
//   concentration_trials int >= 100                                    10000
//   delta_grid         [real >= 0] in units of sqrt(Tr A*A)            [0, 0.5, 1, 1.5, 2, 3, 4, 5]
//   hw_kernel          "identity" | "resolvent"                        "identity"
//   m_grid             [int >= 1]                                      [1, 4, 16, 64]
//   projection_estimator "auto" | "plain" | "tilted"                   "auto"
//   thresholds         object, see Thresholds                          defaults

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hardedge/ensemble.hpp"

namespace hardedge {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct WindowSpec {
  double E = 0.0;
  std::optional<double> eta;    // absolute width
  std::optional<double> scale;  // N eta / sqrt(E); eta derived per N
};

struct PointSpec {
  double E = 0.0;
  double eta = 0.0;
};

/// Desk-calibrated pass/fail thresholds. Every constant left open by the
/// asymptotic statements lives here.
struct Thresholds {
  double apriori_K0 = 1.0;
  double apriori_max_probability = 0.01;
  double locallaw_epsilon = 0.15;
  double locallaw_max_exceedance = 0.05;
  double deloc_C2 = 15.0;            // bound on N |u|_inf^2 / ln N
  double deloc_min_fraction = 0.99;
  double deloc_max_slope = 1.5;      // d log(median) / d log(ln N)
  double hardedge_max_ratio = 2.0;
  double spacing_lo = 0.5;
  double spacing_hi = 2.0;
  double kernel_C1 = 8.0;
  double hw_min_slope = 0.0;

  bool operator==(const Thresholds&) const = default;
};

struct ExperimentConfig {
  std::vector<std::int64_t> sizes{128};
  std::int64_t trials = 100;
  EntryDistribution distribution{};
  double b = 4.5;
  double kappa = 0.5;
  double scale_min = 50.0;
  std::int64_t window_count = 6;
  std::vector<WindowSpec> windows;
  std::vector<PointSpec> thetas;
  std::vector<double> epsilon_grid{0.05, 0.1, 0.15, 0.2};
  std::vector<double> K_grid{1.0, 2.0, 4.0, 8.0};
  std::vector<std::int64_t> L_grid{1, 2, 3, 4, 5};
  std::uint64_t master_seed = 0;
  std::int64_t identity_samples = 20;
  std::int64_t concentration_trials = 10000;
  std::vector<double> delta_grid{0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0};
  std::string hw_kernel = "identity";
  std::vector<std::int64_t> m_grid{1, 4, 16, 64};
  std::string projection_estimator = "auto";
  Thresholds thresholds{};

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Reads, validates and fills defaults. Throws ConfigError on a missing file,
/// malformed JSON, an unknown key or an invariant violation.
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace hardedge
