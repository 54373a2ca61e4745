#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hardedge/config.hpp"
#include "hardedge/report.hpp"

using namespace hardedge;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("hardedge_unit_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TheoremReport toy_report() {
  TheoremReport r;
  r.theorem = "toy";
  r.config = {{"trials", 50}};
  r.seed = 3;
  Sweep s{"grid", {"N", "K"}, "probability", {}};
  s.add({128, 1}, 0.25, 0.2, 0.3, 50);
  s.add({128, 2}, 0.0, 0.0, 0.07, 50);
  s.add({256, 1}, 1.0 / 3.0, 0.3, 0.4, 50);
  r.sweeps.push_back(s);
  r.checks.push_back(Check::make("p", 0.25, "<=", 0.5));
  return r;
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const ExperimentConfig c = config_from_json(json::parse(R"({"sizes":[128],"trials":50,"seed":1})"));
  CHECK(c.sizes == std::vector<std::int64_t>{128});
  CHECK(c.trials == 50);
  CHECK(c.master_seed == 1);
  CHECK(c.kappa == 0.5);
  CHECK(c.scale_min == 50.0);
  CHECK(c.distribution.kind == EntryKind::ComplexGaussian);
  CHECK(c.thresholds == Thresholds{});
}

TEST_CASE("schema violations name the field") {
  auto path_of = [](const char* text) {
    try {
      config_from_json(json::parse(text));
    } catch (const ConfigError& e) {
      return e.path();
    }
    return std::string("<none>");
  };
  CHECK(path_of(R"({"kappa":1.5})") == "kappa");
  CHECK(path_of(R"({"trials":10})") == "trials");
  CHECK(path_of(R"({"b":0})") == "b");
  CHECK(path_of(R"({"colour":"red"})") == "colour");
  CHECK(path_of(R"({"sizes":[128, 0]})") == "sizes[1]");
  CHECK(path_of(R"({"sizes":"many"})") == "sizes");
  CHECK(path_of(R"({"distribution":"cauchy"})") == "distribution");
  CHECK(path_of(R"({"thresholds":{"deloc_C3":1}})") == "thresholds.deloc_C3");
  CHECK(path_of(R"({"windows":[{"E":1}]})") == "windows[0]");
  CHECK(path_of(R"({"windows":[{"E":1,"eta":0.1,"depth":2}]})") == "windows[0].depth");
  CHECK(path_of(R"({"thetas":[{"E":1}]})") == "thetas[0].eta");
  CHECK(path_of(R"({"seed":-4})") == "seed");
  CHECK(path_of(R"({"hw_kernel":"cubic"})") == "hw_kernel");
}

TEST_CASE("config round trip") {
  const ExperimentConfig c = config_from_json(json::parse(R"({
    "sizes":[64,128], "trials":40, "distribution":"real-uniform-symmetric", "kappa":0.3,
    "windows":[{"E":1.0,"eta":0.1},{"E":2.0,"scale":30}], "thetas":[{"E":2,"eta":0.1}],
    "seed":18446744073709551615, "thresholds":{"deloc_C2":9}})"));
  const json once = config_to_json(c);
  const ExperimentConfig again = config_from_json(once);
  CHECK(config_to_json(again) == once);
  CHECK(again.master_seed == 18446744073709551615ULL);
  CHECK(again.thresholds.deloc_C2 == 9.0);
  CHECK(again.windows[1].scale.value() == 30.0);
  CHECK_FALSE(again.windows[1].eta.has_value());
}

TEST_CASE("config files") {
  const auto dir = scratch("config");
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
  std::ofstream(dir / "bad.json") << "{ not json";
  CHECK_THROWS_AS(load_config(dir / "bad.json"), ConfigError);
  std::ofstream(dir / "good.json") << R"({"trials": 31})";
  CHECK(load_config(dir / "good.json").trials == 31);
}

TEST_CASE("number formatting and digests") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(Check::make("x", 1.0, "<", 1.0).passed == false);
  CHECK(Check::make("x", 1.0, "<=", 1.0).passed);
  CHECK_THROWS(Check::make("x", 1.0, "~", 1.0));
}

TEST_CASE("report files") {
  const TheoremReport r = toy_report();
  const auto dir = scratch("report");
  const Manifest m = write_report(r, dir / "a");
  REQUIRE(m.artifacts.size() == 2);
  for (const auto& a : m.artifacts) {
    CHECK(sha256_file(dir / "a" / a.file) == a.sha256);
    CHECK(std::filesystem::file_size(dir / "a" / a.file) == a.bytes);
  }
  const std::string csv = slurp(dir / "a" / "toy_grid.csv");
  CHECK(csv.rfind("N,K,statistic,ci_lo,ci_hi,trials\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + one row per grid point
  CHECK(csv.find("256,1,0.33333333333333331,0.29999999999999999,0.40000000000000002,50") !=
        std::string::npos);

  write_report(r, dir / "b");
  CHECK(slurp(dir / "a" / "toy_grid.csv") == slurp(dir / "b" / "toy_grid.csv"));
  CHECK(slurp(dir / "a" / "toy.json") == slurp(dir / "b" / "toy.json"));
  const json manifest = json::parse(slurp(dir / "a" / "toy_manifest.json"));
  CHECK(manifest["artifacts"].size() == 2);
  CHECK(manifest["run_id"].get<std::string>().find('T') != std::string::npos);

  Sweep bad{"s", {"N"}, "x", {}};
  CHECK_THROWS_AS(bad.add({1, 2}, 0, 0, 0, 1), std::invalid_argument);
}
