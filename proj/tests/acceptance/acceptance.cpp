// One line per acceptance criterion: PASS/FAIL, the measured value, the
// pinned tolerance and the wall time. Exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "hardedge/experiments.hpp"
#include "hardedge/mp_law.hpp"
#include "hardedge/parallel.hpp"
#include "hardedge/report.hpp"
#include "hardedge/spectral.hpp"
#include "hardedge/stats.hpp"

using namespace hardedge;

namespace {

int threads = 1;
int failures = 0;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

void criterion(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o{false, ""};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(),
              secs);
  std::fflush(stdout);
}

double check_value(const TheoremReport& r, const char* name) {
  const Check* c = r.find_check(name);
  if (!c) throw std::runtime_error(std::string("report lacks check ") + name);
  return c->value;
}

bool check_passed(const TheoremReport& r, const char* name) {
  const Check* c = r.find_check(name);
  if (!c) throw std::runtime_error(std::string("report lacks check ") + name);
  return c->passed;
}

std::vector<PointSpec> ten_thetas() {
  return {{0.01, 0.001}, {0.05, 0.01}, {0.2, 0.05}, {0.5, 0.1}, {1.0, 0.01},
          {1.5, 0.3},    {2.0, 0.1},   {2.5, 1.0},  {3.5, 0.05}, {4.5, 0.5}};
}

double density_oracle(double x) {
  if (x <= 0.0 || x >= 4.0) return 0.0;
  return std::sqrt((4.0 - x) / x) / (2.0 * M_PI);
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::strcmp(argv[i], "--threads") == 0) threads = std::max(1, std::atoi(argv[i + 1]));
  }
  const RunOptions opts{threads};

  criterion(1, "fixed-point identity on a 100-point log grid", [] {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) {
        const double E = std::pow(10.0, -3.0 + 4.0 * i / 9.0);
        const double eta = std::pow(10.0, -4.0 + 5.0 * j / 9.0);
        const SpectralPoint p = SpectralPoint::make(E, eta);
        worst = std::max(worst, fixed_point_residual(mp_stieltjes(p), p));
      }
    }
    return Outcome{worst < 1e-12, "max residual " + num(worst) + " < 1e-12"};
  });

  criterion(2, "normalization and moments by quadrature", [] {
    double worst_norm = std::abs(mp_expectation([](double) { return 1.0; }) - 1.0);
    boost::math::quadrature::tanh_sinh<double> ts;
    worst_norm = std::max(worst_norm, std::abs(ts.integrate(density_oracle, 0.0, 4.0) - 1.0));
    double worst_moment = 0.0;
    const double expected[] = {1.0, 2.0, 5.0};
    for (int k = 1; k <= 3; ++k) {
      const double a = mp_expectation([k](double x) { return std::pow(x, k); });
      const double b = ts.integrate([k](double x) { return std::pow(x, k) * density_oracle(x); },
                                    0.0, 4.0);
      worst_moment = std::max({worst_moment, std::abs(a - expected[k - 1]),
                               std::abs(b - expected[k - 1])});
    }
    return Outcome{worst_norm < 1e-10 && worst_moment < 1e-6,
                   "|mass - 1| " + num(worst_norm) + " < 1e-10, moment error " +
                       num(worst_moment) + " < 1e-6"};
  });

  ExperimentConfig ident;
  ident.identity_samples = 20;
  ident.master_seed = 20240501;
  ident.thetas = ten_thetas();
  ident.K_grid = {1, 4, 16};
  TheoremReport id16, id32, id64;
  double counting_violations = 0.0;

  criterion(3, "leave-one-out diagonal vs dense inversion (N = 16, 32)", [&] {
    ident.sizes = {16};
    id16 = run_identities(ident, opts);
    ident.sizes = {32};
    id32 = run_identities(ident, opts);
    const double loo = std::max(check_value(id16, "leave_one_out_vs_dense"),
                                check_value(id32, "leave_one_out_vs_dense"));
    const double schur = std::max(check_value(id16, "schur_vs_leave_one_out"),
                                  check_value(id32, "schur_vs_leave_one_out"));
    return Outcome{loo < 1e-9 && schur < 1e-9,
                   "max |loo - dense| / max(1, |G_kk|) " + num(loo) + ", schur " + num(schur) +
                       " < 1e-9"};
  });

  criterion(4, "eigenvector component identity (N = 16, 20 samples)", [&] {
    const double res = check_value(id16, "eigenvector_identity");
    const double cov = check_value(id16, "eigenvector_identity_coverage");
    return Outcome{res < 1e-8 && cov >= 0.95,
                   "max residual " + num(res) + " < 1e-8, coverage " + num(cov) + " >= 0.95"};
  });

  criterion(5, "interlacing (N = 64, 100 samples, every k)", [&] {
    ident.sizes = {64};
    ident.identity_samples = 100;
    id64 = run_identities(ident, opts);
    const double v = check_value(id64, "interlacing_relative");
    return Outcome{v <= 1e-10, "max violation / s_N " + num(v) + " <= 1e-10"};
  });

  criterion(6, "counting inequality N_I <= 2 eta Im Tr G", [&] {
    for (const auto* r : {&id16, &id32, &id64}) {
      counting_violations += check_value(*r, "counting_violations");
    }
    return Outcome{counting_violations == 0.0,
                   num(counting_violations) + " violations over 140 samples x 13 windows"};
  });

  criterion(7, "global MP convergence (N = 1024, 10 trials)", [&] {
    double worst = 0.0;
    const EnsembleSpec spec{1024, {}, 7};
    std::vector<double> ks(10);
    parallel_for(10, threads, [&](std::size_t t) {
      const SpectralDecomposition d = decompose(sample_matrix(spec, t), false);
      ks[t] = ks_distance(std::span<const double>(d.eigenvalues.data(), 1024),
                          [](double x) { return mp_cdf(x); });
    });
    for (double k : ks) worst = std::max(worst, k);
    return Outcome{worst < 0.05, "max sup |F_N - F| " + num(worst) + " < 0.05"};
  });

  criterion(8, "local law at theta = 2 + 0.1i (N = 128, 512; 200 trials)", [&] {
    ExperimentConfig c;
    c.sizes = {128, 512};
    c.trials = 200;
    c.master_seed = 8;
    c.thetas = {{2.0, 0.1}};
    c.epsilon_grid = {0.05, 0.1, 0.15, 0.2};
    const TheoremReport r = run_local_law(c, opts);
    const double p = check_value(r, "stieltjes_max_exceedance_largest_N");
    const bool trend = check_passed(r, "trend_violations");
    return Outcome{p <= 0.05 && trend, "P(sqrt(E)|Delta_N - Delta| >= 0.15) at N=512 " + num(p) +
                                           " <= 0.05, trend in N " + (trend ? "holds" : "fails")};
  });

  criterion(9, "delocalization (N = 128, 512, 1024; 50 trials)", [&] {
    ExperimentConfig c;
    c.sizes = {128, 512, 1024};
    c.trials = 50;
    c.master_seed = 9;
    const TheoremReport r = run_delocalization(c, opts);
    const double f = check_value(r, "min_fraction_within_C2");
    const double slope = check_value(r, "growth_slope_vs_log_lnN");
    return Outcome{f >= 0.99 && slope <= 1.5,
                   "fraction with max N|u|^2/ln N <= 15: " + num(f) +
                       " >= 0.99, growth slope vs ln ln N " + num(slope) + " <= 1.5"};
  });

  criterion(10, "hard-edge N^2 scaling (N = 128, 256, 512; 200 trials)", [&] {
    ExperimentConfig c;
    c.sizes = {128, 256, 512};
    c.trials = 200;
    c.master_seed = 10;
    const TheoremReport r = run_hard_edge_scaling(c, opts);
    const double ratio = check_value(r, "median_ratio");
    return Outcome{ratio <= 2.0, "max/min median of N^2 s_1 " + num(ratio) + " <= 2"};
  });

  criterion(11, "near-zero count decay (N = 256, 2000 trials, K = 1)", [&] {
    ExperimentConfig c;
    c.sizes = {256};
    c.trials = 2000;
    c.master_seed = 11;
    c.K_grid = {1, 4, 16};
    c.L_grid = {2, 3, 4, 5};
    const TheoremReport r = run_wegner(c, opts);
    std::string values;
    for (const auto& row : r.find_sweep("neglog")->rows) {
      if (row.keys[1] == 1.0) values += format_number(row.statistic).substr(0, 6) + " ";
    }
    const bool ok = check_passed(r, "neglog_not_increasing_at_smallest_K");
    return Outcome{ok, "-log P for L = 2..5: " + values + "(increasing in the extended reals)"};
  });

  criterion(12, "concentration shapes", [&] {
    ExperimentConfig c;
    c.master_seed = 12;
    c.concentration_trials = 10000;
    c.m_grid = {1, 4, 16, 64, 256};
    c.sizes = {128};
    const TheoremReport hw = run_hw(c, opts);
    c.sizes = {256};
    const TheoremReport pm = run_projmass(c, opts);
    const bool mono = check_passed(hw, "monotone_violations");
    const double slope = check_value(hw, "fitted_slope");
    const bool rate = check_passed(pm, "rate_increasing_in_m");
    const double pslope = check_value(pm, "sqrt_m_slope");
    std::string rates;
    for (const auto& row : pm.find_sweep("rate")->rows) rates += num(row.statistic) + " ";
    return Outcome{mono && slope > 0.0 && rate && pslope > 0.0,
                   std::string("tail monotone ") + (mono ? "yes" : "no") + ", decay slope " +
                       num(slope) + " > 0; -log P / sqrt(m) for m = 1..256: " + rates +
                       (rate ? "increasing" : "not increasing")};
  });

  criterion(13, "determinism across thread counts", [&] {
    const auto base = std::filesystem::temp_directory_path() / "hardedge_acceptance_determinism";
    std::filesystem::remove_all(base);
    ExperimentConfig c;
    c.sizes = {64, 128};
    c.trials = 60;
    c.master_seed = 13;
    ExperimentConfig small_ident = ident;
    small_ident.sizes = {16};
    small_ident.identity_samples = 5;
    bool same = true;
    int files = 0;
    for (const auto& [name, run] :
         std::vector<std::pair<std::string, std::function<TheoremReport(int)>>>{
             {"apriori", [&](int t) { return run_apriori(c, {t}); }},
             {"wegner", [&](int t) { return run_wegner(c, {t}); }},
             {"identities", [&](int t) { return run_identities(small_ident, {t}); }}}) {
      const Manifest a = write_report(run(1), base / (name + "_1"));
      const Manifest b = write_report(run(3), base / (name + "_3"));
      for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
        same = same && a.artifacts[i].sha256 == b.artifacts[i].sha256;
        ++files;
      }
    }
    return Outcome{same, std::to_string(files) + " artifacts, digests identical for 1 and 3 threads"};
  });

  std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
