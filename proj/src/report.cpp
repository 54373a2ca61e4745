#include "hardedge/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace hardedge {

using nlohmann::json;

namespace {

json number(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string utc_stamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

}  // namespace

const char* tool_version() { return "hardedge 0.1.0"; }

void Sweep::add(std::vector<double> keys, double statistic, double ci_lo, double ci_hi,
                std::int64_t trials) {
  if (keys.size() != key_names.size()) {
    throw std::invalid_argument("Sweep::add: key count does not match the sweep '" + name + "'");
  }
  rows.push_back({std::move(keys), statistic, ci_lo, ci_hi, trials});
}

Check Check::make(std::string name, double value, std::string relation, double threshold) {
  bool ok = false;
  if (relation == "<=") ok = value <= threshold;
  else if (relation == "<") ok = value < threshold;
  else if (relation == ">=") ok = value >= threshold;
  else if (relation == ">") ok = value > threshold;
  else if (relation == "==") ok = value == threshold;
  else throw std::invalid_argument("Check::make: unknown relation " + relation);
  return {std::move(name), value, threshold, std::move(relation), ok};
}

bool TheoremReport::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

const Sweep* TheoremReport::find_sweep(std::string_view name) const {
  for (const auto& s : sweeps) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const Check* TheoremReport::find_check(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

json TheoremReport::to_json() const {
  json sweeps_json = json::array();
  for (const auto& s : sweeps) {
    json rows = json::array();
    for (const auto& r : s.rows) {
      json keys = json::array();
      for (double k : r.keys) keys.push_back(number(k));
      rows.push_back({{"keys", keys},
                      {"statistic", number(r.statistic)},
                      {"ci_lo", number(r.ci_lo)},
                      {"ci_hi", number(r.ci_hi)},
                      {"trials", r.trials}});
    }
    sweeps_json.push_back(
        {{"name", s.name}, {"keys", s.key_names}, {"statistic", s.statistic}, {"rows", rows}});
  }
  json checks_json = json::array();
  for (const auto& c : checks) {
    checks_json.push_back({{"name", c.name},
                           {"value", number(c.value)},
                           {"relation", c.relation},
                           {"threshold", number(c.threshold)},
                           {"passed", c.passed}});
  }
  return {{"theorem", theorem},
          {"seed", seed},
          {"config", config},
          {"passed", passed()},
          {"checks", checks_json},
          {"summary", summary},
          {"notes", notes},
          {"sweeps", sweeps_json}};
}

json Manifest::to_json() const {
  json files = json::array();
  for (const auto& a : artifacts) {
    files.push_back({{"file", a.file}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  }
  return {{"run_id", run_id}, {"tool_version", tool_version}, {"config", config},
          {"artifacts", files}};
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string sweep_csv(const Sweep& sweep) {
  std::string out;
  for (const auto& k : sweep.key_names) out += k + ",";
  out += "statistic,ci_lo,ci_hi,trials\n";
  for (const auto& r : sweep.rows) {
    for (double k : r.keys) out += format_number(k) + ",";
    out += format_number(r.statistic) + "," + format_number(r.ci_lo) + "," +
           format_number(r.ci_hi) + "," + std::to_string(r.trials) + "\n";
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

Manifest write_report(const TheoremReport& report, const std::filesystem::path& outdir) {
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw std::runtime_error("cannot create " + outdir.string() + ": " + ec.message());

  Manifest manifest;
  manifest.tool_version = tool_version();
  manifest.config = report.config;
  auto emit = [&](const std::string& file, const std::string& contents) {
    write_file(outdir / file, contents);
    manifest.artifacts.push_back({file, sha256_hex(contents), contents.size()});
  };

  emit(report.theorem + ".json", report.to_json().dump(2) + "\n");
  for (const auto& s : report.sweeps) emit(report.theorem + "_" + s.name + ".csv", sweep_csv(s));

  const std::string key = report.config.dump() + "|" + std::to_string(report.seed);
  manifest.run_id = utc_stamp() + "-" + sha256_hex(key).substr(0, 12);
  write_file(outdir / (report.theorem + "_manifest.json"), manifest.to_json().dump(2) + "\n");
  return manifest;
}

}  // namespace hardedge
