#pragma once

// Theorem reports and their on-disk form: a JSON report, one CSV per sweep and
// a manifest listing every emitted file with its SHA-256 digest.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace hardedge {

struct SweepRow {
  std::vector<double> keys;  // one value per Sweep::key_names entry
  double statistic = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::int64_t trials = 0;
};

/// A flat table; CSV columns are key_names..., statistic, ci_lo, ci_hi, trials.
struct Sweep {
  std::string name;
  std::vector<std::string> key_names;
  std::string statistic;  // what the statistic column holds
  std::vector<SweepRow> rows;

  void add(std::vector<double> keys, double statistic, double ci_lo, double ci_hi,
           std::int64_t trials);
};

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=", ">=", "<", ">" or "==" (value relation threshold)
  bool passed = false;

  static Check make(std::string name, double value, std::string relation, double threshold);
};

struct TheoremReport {
  std::string theorem;
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::vector<Sweep> sweeps;
  std::vector<Check> checks;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> notes;

  bool passed() const;
  const Sweep* find_sweep(std::string_view name) const;
  const Check* find_check(std::string_view name) const;
  nlohmann::json to_json() const;
};

struct Artifact {
  std::string file;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct Manifest {
  std::string run_id;  // UTC timestamp and a hash of (config, seed)
  std::string tool_version;
  nlohmann::json config;
  std::vector<Artifact> artifacts;

  nlohmann::json to_json() const;
};

/// 17 significant digits; inf and nan spelled "inf", "-inf", "nan".
std::string format_number(double x);

/// The sweep as CSV text (header line plus one line per row).
std::string sweep_csv(const Sweep& sweep);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Writes <theorem>.json, <theorem>_<sweep>.csv for every sweep and
/// <theorem>_manifest.json into outdir (created if missing). Only the
/// manifest carries a timestamp. Throws std::runtime_error naming the path on
/// IO failure.
Manifest write_report(const TheoremReport& report, const std::filesystem::path& outdir);

const char* tool_version();

}  // namespace hardedge
