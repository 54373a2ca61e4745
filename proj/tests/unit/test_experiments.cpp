#include <doctest.h>

#include <cmath>
#include <limits>

#include "hardedge/experiments.hpp"

using namespace hardedge;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.sizes = {32};
  c.trials = 30;
  c.master_seed = 17;
  c.scale_min = 8.0;
  c.window_count = 3;
  c.identity_samples = 3;
  c.concentration_trials = 500;
  return c;
}

double stat(const TheoremReport& r, const std::string& sweep, std::size_t row) {
  return r.find_sweep(sweep)->rows.at(row).statistic;
}

}  // namespace

TEST_CASE("derived windows") {
  ExperimentConfig c = small_config();
  const auto w = experiment_windows(c, 64);
  REQUIRE(w.size() == 3);
  CHECK(w.front().E == doctest::Approx(std::pow(8.0 / (0.5 * 64), 2)));
  CHECK(w.back().E == doctest::Approx(3.5));
  for (const auto& x : w) CHECK(64 * x.eta / std::sqrt(x.E) == doctest::Approx(8.0));
  c.scale_min = 100.0;
  CHECK_THROWS_AS(experiment_windows(c, 32), ExperimentError);
  c.windows = {WindowSpec{2.0, std::nullopt, 20.0}};
  CHECK(experiment_windows(c, 40).front().eta == doctest::Approx(20.0 * std::sqrt(2.0) / 40));
  const auto e = deloc_edges(small_config(), 32);
  CHECK(e.wide == doctest::Approx(8.0 / 256.0));
  CHECK(e.narrow == doctest::Approx(64.0 / 256.0));
}

TEST_CASE("extended-real monotonicity") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(increasing_extended({0.5, 3.0, inf, inf}));
  CHECK(increasing_extended({inf, inf}));
  CHECK_FALSE(increasing_extended({0.5, 0.5}));
  CHECK_FALSE(increasing_extended({inf, 3.0}));
  CHECK_FALSE(increasing_extended({1.0, std::nan("")}));
}

TEST_CASE("apriori: huge K gives probability zero and nesting holds") {
  ExperimentConfig c = small_config();
  c.K_grid = {0.01, 0.1, 1.0, 1e6};
  const TheoremReport r = run_apriori(c);
  const Sweep* s = r.find_sweep("exceedance");
  REQUIRE(s);
  CHECK(s->rows.size() == 3 * 4);
  for (std::size_t i = 0; i < s->rows.size(); i += 4) CHECK(s->rows[i + 3].statistic == 0.0);
  CHECK(r.find_check("nesting_violations")->passed);
  CHECK(r.passed());
}

TEST_CASE("local law: enormous epsilon is never exceeded") {
  ExperimentConfig c = small_config();
  c.epsilon_grid = {1e3};
  c.thetas = {{2.0, 0.5}};
  c.sizes = {16, 32};
  const TheoremReport r = run_local_law(c);
  for (const auto& row : r.find_sweep("stieltjes")->rows) CHECK(row.statistic == 0.0);
  for (const auto& row : r.find_sweep("density")->rows) CHECK(row.statistic == 0.0);
  CHECK(r.find_check("trend_violations"));
  for (const auto& row : r.find_sweep("kernel")->rows) CHECK(row.statistic == 1.0);
  CHECK(r.find_check("kernel_min_fraction_within_C1_largest_N")->passed);
  c.distribution = parse_distribution("rademacher-pair");
  CHECK_THROWS_AS(run_local_law(c), ExperimentError);
}

TEST_CASE("delocalization and the pigeonhole bound") {
  const TheoremReport r = run_delocalization(small_config());
  CHECK(r.find_check("min_N_sup_norm_squared")->passed);
  CHECK(r.find_sweep("sup_norm")->rows.size() == 2);
}

TEST_CASE("wegner: L beyond N has probability zero") {
  ExperimentConfig c = small_config();
  c.sizes = {8};
  c.L_grid = {1, 9};
  const TheoremReport r = run_wegner(c);
  const Sweep* s = r.find_sweep("exceedance");
  for (const auto& row : s->rows) {
    if (row.keys[2] > 8) CHECK(row.statistic == 0.0);
  }
}

TEST_CASE("hard edge scaling is positive") {
  const TheoremReport r = run_hard_edge_scaling(small_config());
  CHECK(r.find_check("min_scaled_smallest")->passed);
  CHECK(stat(r, "smallest", 0) > 0.0);
}

TEST_CASE("quadratic-form and projection harnesses") {
  ExperimentConfig c = small_config();
  const TheoremReport hw = run_hw(c);
  CHECK(stat(hw, "tail", 0) == 1.0);
  c.hw_kernel = "resolvent";
  c.thetas = {{1.0, 0.2}};
  const TheoremReport hw2 = run_hw(c);
  CHECK(hw2.find_check("monotone_violations")->passed);
  c.m_grid = {1, 4, 16};
  const TheoremReport pm = run_projmass(c);
  CHECK(pm.summary["estimator"] == "tilted");
  c.m_grid = {64};
  CHECK_THROWS_AS(run_projmass(c), ExperimentError);
}

TEST_CASE("identities pass and do not depend on the thread count") {
  ExperimentConfig c = small_config();
  c.sizes = {8, 12};
  const TheoremReport one = run_identities(c, RunOptions{1});
  const TheoremReport three = run_identities(c, RunOptions{3});
  CHECK(one.passed());
  CHECK(one.to_json() == three.to_json());
}

TEST_CASE("reports are reproducible across thread counts") {
  ExperimentConfig c = small_config();
  CHECK(run_apriori(c, {1}).to_json() == run_apriori(c, {4}).to_json());
  CHECK(run_hw(c, {1}).to_json() == run_hw(c, {2}).to_json());
}
