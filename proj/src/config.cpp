#include "hardedge/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace hardedge {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& path) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
    }
  }
}

double get_real(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

std::int64_t get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  return v.get<std::int64_t>();
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

template <typename T, typename F>
std::vector<T> get_list(const json& v, const std::string& path, F&& element) {
  if (!v.is_array()) throw ConfigError(path, "expected a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(element(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

Thresholds thresholds_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("thresholds", "expected an object");
  Thresholds t;
  struct Field {
    const char* key;
    double Thresholds::*member;
  };
  static const Field fields[] = {
      {"apriori_K0", &Thresholds::apriori_K0},
      {"apriori_max_probability", &Thresholds::apriori_max_probability},
      {"locallaw_epsilon", &Thresholds::locallaw_epsilon},
      {"locallaw_max_exceedance", &Thresholds::locallaw_max_exceedance},
      {"deloc_C2", &Thresholds::deloc_C2},
      {"deloc_min_fraction", &Thresholds::deloc_min_fraction},
      {"deloc_max_slope", &Thresholds::deloc_max_slope},
      {"hardedge_max_ratio", &Thresholds::hardedge_max_ratio},
      {"spacing_lo", &Thresholds::spacing_lo},
      {"spacing_hi", &Thresholds::spacing_hi},
      {"kernel_C1", &Thresholds::kernel_C1},
      {"hw_min_slope", &Thresholds::hw_min_slope},
  };
  std::set<std::string> allowed;
  for (const auto& f : fields) allowed.insert(f.key);
  reject_unknown(j, allowed, "thresholds");
  for (const auto& f : fields) {
    if (j.contains(f.key)) t.*(f.member) = get_real(j.at(f.key), std::string("thresholds.") + f.key);
  }
  return t;
}

json thresholds_to_json(const Thresholds& t) {
  return json{{"apriori_K0", t.apriori_K0},
              {"apriori_max_probability", t.apriori_max_probability},
              {"locallaw_epsilon", t.locallaw_epsilon},
              {"locallaw_max_exceedance", t.locallaw_max_exceedance},
              {"deloc_C2", t.deloc_C2},
              {"deloc_min_fraction", t.deloc_min_fraction},
              {"deloc_max_slope", t.deloc_max_slope},
              {"hardedge_max_ratio", t.hardedge_max_ratio},
              {"spacing_lo", t.spacing_lo},
              {"spacing_hi", t.spacing_hi},
              {"kernel_C1", t.kernel_C1},
              {"hw_min_slope", t.hw_min_slope}};
}

}  // namespace

void ExperimentConfig::validate() const {
  require(!sizes.empty(), "sizes", "must not be empty");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    require(sizes[i] >= 1, "sizes[" + std::to_string(i) + "]", "must be >= 1");
  }
  require(trials >= 30, "trials", "must be >= 30");
  require(b > 0.0 && std::isfinite(b), "b", "must be > 0");
  require(kappa > 0.0 && kappa < 1.0, "kappa", "must lie in (0, 1)");
  require(scale_min > 0.0 && std::isfinite(scale_min), "scale_min", "must be > 0");
  require(window_count >= 1, "window_count", "must be >= 1");
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const std::string p = "windows[" + std::to_string(i) + "]";
    require(windows[i].E > 0.0, p + ".E", "must be > 0");
    require(windows[i].eta.has_value() != windows[i].scale.has_value(), p,
            "give exactly one of eta or scale");
    if (windows[i].eta) require(*windows[i].eta > 0.0, p + ".eta", "must be > 0");
    if (windows[i].scale) require(*windows[i].scale > 0.0, p + ".scale", "must be > 0");
  }
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const std::string p = "thetas[" + std::to_string(i) + "]";
    require(thetas[i].E > 0.0, p + ".E", "must be > 0");
    require(thetas[i].eta > 0.0, p + ".eta", "must be > 0");
  }
  for (std::size_t i = 0; i < epsilon_grid.size(); ++i) {
    require(epsilon_grid[i] > 0.0, "epsilon_grid[" + std::to_string(i) + "]", "must be > 0");
  }
  for (std::size_t i = 0; i < K_grid.size(); ++i) {
    require(K_grid[i] > 0.0, "K_grid[" + std::to_string(i) + "]", "must be > 0");
  }
  for (std::size_t i = 0; i < L_grid.size(); ++i) {
    require(L_grid[i] >= 1, "L_grid[" + std::to_string(i) + "]", "must be >= 1");
  }
  require(identity_samples >= 1, "identity_samples", "must be >= 1");
  require(concentration_trials >= 100, "concentration_trials", "must be >= 100");
  for (std::size_t i = 0; i < delta_grid.size(); ++i) {
    require(delta_grid[i] >= 0.0, "delta_grid[" + std::to_string(i) + "]", "must be >= 0");
  }
  require(hw_kernel == "identity" || hw_kernel == "resolvent", "hw_kernel",
          "must be \"identity\" or \"resolvent\"");
  require(!m_grid.empty(), "m_grid", "must not be empty");
  for (std::size_t i = 0; i < m_grid.size(); ++i) {
    require(m_grid[i] >= 1, "m_grid[" + std::to_string(i) + "]", "must be >= 1");
  }
  require(projection_estimator == "auto" || projection_estimator == "plain" ||
              projection_estimator == "tilted",
          "projection_estimator", "must be \"auto\", \"plain\" or \"tilted\"");
  require(thresholds.locallaw_epsilon > 0.0, "thresholds.locallaw_epsilon", "must be > 0");
  require(thresholds.deloc_min_fraction >= 0.0 && thresholds.deloc_min_fraction <= 1.0,
          "thresholds.deloc_min_fraction", "must lie in [0, 1]");
  require(thresholds.spacing_lo < thresholds.spacing_hi, "thresholds.spacing_lo",
          "must be below spacing_hi");
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("", "configuration must be a JSON object");
  static const std::set<std::string> allowed = {
      "sizes", "trials", "distribution", "b", "kappa", "scale_min", "window_count", "windows",
      "thetas", "epsilon_grid", "K_grid", "L_grid", "seed", "identity_samples",
      "concentration_trials", "delta_grid", "hw_kernel", "m_grid", "projection_estimator",
      "thresholds"};
  reject_unknown(j, allowed, "");

  ExperimentConfig c;
  auto real_el = [](const json& v, const std::string& p) { return get_real(v, p); };
  auto int_el = [](const json& v, const std::string& p) { return get_int(v, p); };

  if (j.contains("sizes")) c.sizes = get_list<std::int64_t>(j["sizes"], "sizes", int_el);
  if (j.contains("trials")) c.trials = get_int(j["trials"], "trials");
  if (j.contains("distribution")) {
    try {
      c.distribution = parse_distribution(get_string(j["distribution"], "distribution"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("distribution", e.what());
    }
  }
  if (j.contains("b")) c.b = get_real(j["b"], "b");
  if (j.contains("kappa")) c.kappa = get_real(j["kappa"], "kappa");
  if (j.contains("scale_min")) c.scale_min = get_real(j["scale_min"], "scale_min");
  if (j.contains("window_count")) c.window_count = get_int(j["window_count"], "window_count");
  if (j.contains("windows")) {
    c.windows = get_list<WindowSpec>(j["windows"], "windows", [](const json& v, const std::string& p) {
      if (!v.is_object()) throw ConfigError(p, "expected an object");
      reject_unknown(v, {"E", "eta", "scale"}, p);
      if (!v.contains("E")) throw ConfigError(p + ".E", "missing");
      WindowSpec w;
      w.E = get_real(v["E"], p + ".E");
      if (v.contains("eta")) w.eta = get_real(v["eta"], p + ".eta");
      if (v.contains("scale")) w.scale = get_real(v["scale"], p + ".scale");
      return w;
    });
  }
  if (j.contains("thetas")) {
    c.thetas = get_list<PointSpec>(j["thetas"], "thetas", [](const json& v, const std::string& p) {
      if (!v.is_object()) throw ConfigError(p, "expected an object");
      reject_unknown(v, {"E", "eta"}, p);
      if (!v.contains("E")) throw ConfigError(p + ".E", "missing");
      if (!v.contains("eta")) throw ConfigError(p + ".eta", "missing");
      return PointSpec{get_real(v["E"], p + ".E"), get_real(v["eta"], p + ".eta")};
    });
  }
  if (j.contains("epsilon_grid")) c.epsilon_grid = get_list<double>(j["epsilon_grid"], "epsilon_grid", real_el);
  if (j.contains("K_grid")) c.K_grid = get_list<double>(j["K_grid"], "K_grid", real_el);
  if (j.contains("L_grid")) c.L_grid = get_list<std::int64_t>(j["L_grid"], "L_grid", int_el);
  if (j.contains("seed")) {
    const json& s = j["seed"];
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
      throw ConfigError("seed", "expected a nonnegative integer");
    }
    c.master_seed = s.get<std::uint64_t>();
  }
  if (j.contains("identity_samples")) c.identity_samples = get_int(j["identity_samples"], "identity_samples");
  if (j.contains("concentration_trials")) {
    c.concentration_trials = get_int(j["concentration_trials"], "concentration_trials");
  }
  if (j.contains("delta_grid")) c.delta_grid = get_list<double>(j["delta_grid"], "delta_grid", real_el);
  if (j.contains("hw_kernel")) c.hw_kernel = get_string(j["hw_kernel"], "hw_kernel");
  if (j.contains("m_grid")) c.m_grid = get_list<std::int64_t>(j["m_grid"], "m_grid", int_el);
  if (j.contains("projection_estimator")) {
    c.projection_estimator = get_string(j["projection_estimator"], "projection_estimator");
  }
  if (j.contains("thresholds")) c.thresholds = thresholds_from_json(j["thresholds"]);
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json windows = json::array();
  for (const auto& w : c.windows) {
    json e{{"E", w.E}};
    if (w.eta) e["eta"] = *w.eta;
    if (w.scale) e["scale"] = *w.scale;
    windows.push_back(e);
  }
  json thetas = json::array();
  for (const auto& t : c.thetas) thetas.push_back({{"E", t.E}, {"eta", t.eta}});
  return json{{"sizes", c.sizes},
              {"trials", c.trials},
              {"distribution", c.distribution.name()},
              {"b", c.b},
              {"kappa", c.kappa},
              {"scale_min", c.scale_min},
              {"window_count", c.window_count},
              {"windows", windows},
              {"thetas", thetas},
              {"epsilon_grid", c.epsilon_grid},
              {"K_grid", c.K_grid},
              {"L_grid", c.L_grid},
              {"seed", c.master_seed},
              {"identity_samples", c.identity_samples},
              {"concentration_trials", c.concentration_trials},
              {"delta_grid", c.delta_grid},
              {"hw_kernel", c.hw_kernel},
              {"m_grid", c.m_grid},
              {"projection_estimator", c.projection_estimator},
              {"thresholds", thresholds_to_json(c.thresholds)}};
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "malformed JSON in " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace hardedge
