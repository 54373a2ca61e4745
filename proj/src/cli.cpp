#include "hardedge/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "hardedge/config.hpp"
#include "hardedge/ensemble.hpp"
#include "hardedge/experiments.hpp"
#include "hardedge/mp_law.hpp"
#include "hardedge/report.hpp"

namespace hardedge {

const char* config_schema_help() {
  return R"(Configuration file (JSON object, every key optional, unknown keys rejected):
  sizes                 [int >= 1]          matrix sizes N               [128]
  trials                int >= 30           trials per size              100
  distribution          string              complex-gaussian | rademacher-pair |
                                            uniform-symmetric, optional real- prefix
  b                     real > 0            log power (metadata)         4.5
  kappa                 real in (0, 1)      distance from the soft edge  0.5
  scale_min             real > 0            N eta / sqrt(E)              50
  window_count          int >= 1            derived windows per size     6
  windows               [{E, eta} | {E, scale}]                          []
  thetas                [{E, eta}]                                       []
  epsilon_grid          [real > 0]                                       [0.05, 0.1, 0.15, 0.2]
  K_grid                [real > 0]                                       [1, 2, 4, 8]
  L_grid                [int >= 1]                                       [1, 2, 3, 4, 5]
  seed                  uint64              master seed                  0
  identity_samples      int >= 1                                         20
  concentration_trials  int >= 100                                       10000
  delta_grid            [real >= 0]         units of sqrt(Tr A*A)        [0, 0.5, 1, 1.5, 2, 3, 4, 5]
  hw_kernel             identity | resolvent                             identity
  m_grid                [int >= 1]                                       [1, 4, 16, 64]
  projection_estimator  auto | plain | tilted                            auto
  thresholds            {apriori_K0, apriori_max_probability, locallaw_epsilon,
                         locallaw_max_exceedance, deloc_C2, deloc_min_fraction,
                         deloc_max_slope, hardedge_max_ratio, spacing_lo, spacing_hi,
                         kernel_C1, hw_min_slope}
)";
}

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::int64_t> trials;
  int threads = 1;
  std::vector<std::int64_t> sizes;
  std::string distribution;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "JSON configuration file");
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--out", f.out, "output directory (default $HARDEDGE_OUT or ./hardedge-out)");
  sub->add_option("--trials", f.trials, "trials (samples for identities)")->check(CLI::PositiveNumber);
  sub->add_option("--threads", f.threads, "worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);
  sub->add_option("--n", f.sizes, "matrix sizes, overriding the config")->check(CLI::PositiveNumber);
  sub->add_option("--distribution", f.distribution, "entry law, overriding the config");
}

ExperimentConfig build_config(const CommonFlags& f, const std::string& command) {
  ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
  if (f.seed) cfg.master_seed = *f.seed;
  if (!f.sizes.empty()) cfg.sizes = f.sizes;
  if (!f.distribution.empty()) {
    try {
      cfg.distribution = parse_distribution(f.distribution);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("distribution", e.what());
    }
  }
  if (f.trials) {
    if (command == "identities") cfg.identity_samples = *f.trials;
    else if (command == "hw" || command == "projmass") cfg.concentration_trials = *f.trials;
    else cfg.trials = *f.trials;
  }
  cfg.validate();
  return cfg;
}

std::string output_dir(const CommonFlags& f) {
  if (!f.out.empty()) return f.out;
  if (const char* env = std::getenv("HARDEDGE_OUT"); env && *env) return env;
  return "hardedge-out";
}

std::string fmt6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hardedge: Marchenko-Pastur hard-edge laboratory"};
  app.require_subcommand(1);

  // mp
  CLI::App* mp = app.add_subcommand("mp", "evaluate the Marchenko-Pastur law");
  std::optional<double> density, cdf;
  std::vector<double> mass, stieltjes, bounds;
  mp->add_option("--density", density, "density at E");
  mp->add_option("--cdf", cdf, "distribution function at E");
  mp->add_option("--mass", mass, "mass of [E, E + eta]")->expected(2);
  mp->add_option("--stieltjes", stieltjes, "Delta(E + i eta)")->expected(2);
  mp->add_option("--bounds", bounds, "check the bounds on Delta at E + i eta")->expected(2);

  // sample
  CLI::App* sample = app.add_subcommand("sample", "dump one matrix sample in binary form");
  CommonFlags sample_flags;
  std::uint64_t trial_index = 0;
  add_common(sample, sample_flags);
  sample->add_option("--trial", trial_index, "trial index");

  const std::map<std::string, std::function<TheoremReport(const ExperimentConfig&, const RunOptions&)>>
      runners = {{"apriori", run_apriori},   {"locallaw", run_local_law},
                 {"deloc", run_delocalization}, {"wegner", run_wegner},
                 {"hardedge", run_hard_edge_scaling}, {"hw", run_hw},
                 {"projmass", run_projmass}, {"identities", run_identities}};
  const std::map<std::string, std::string> descriptions = {
      {"apriori", "a priori bound on window counts"},
      {"locallaw", "local law for the Stieltjes transform and the density"},
      {"deloc", "eigenvector delocalization"},
      {"wegner", "near-zero eigenvalue counts"},
      {"hardedge", "N^2 scaling of the smallest eigenvalue"},
      {"hw", "quadratic-form tails"},
      {"projmass", "lower tail of projection mass"},
      {"identities", "exact identity suites"}};
  std::map<std::string, CommonFlags> flags;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, run] : runners) {
    subs[name] = app.add_subcommand(name, descriptions.at(name));
    add_common(subs[name], flags[name]);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (mp->parsed()) {
      if (!density && !cdf && mass.empty() && stieltjes.empty() && bounds.empty()) {
        err << "mp: give at least one of --density, --cdf, --mass, --stieltjes, --bounds\n";
        return 2;
      }
      if (density) out << fmt6(mp_density(*density)) << "\n";
      if (cdf) out << fmt6(mp_cdf(*cdf)) << "\n";
      if (!mass.empty()) out << fmt6(mp_window_mass(Window::make(mass[0], mass[1]))) << "\n";
      if (!stieltjes.empty()) {
        const Complex d = mp_stieltjes(SpectralPoint::make(stieltjes[0], stieltjes[1]));
        out << fmt6(d.real()) << " " << fmt6(d.imag()) << "\n";
      }
      if (!bounds.empty()) {
        const auto rep = check_delta_bounds(SpectralPoint::make(bounds[0], bounds[1]));
        out << "modulus " << (rep.modulus_holds ? "holds" : "fails") << " margin "
            << fmt6(rep.modulus_margin) << "\n";
        out << "shift " << (rep.shift_holds ? "holds" : "fails") << " margin "
            << fmt6(rep.shift_margin) << "\n";
        if (rep.imag_evaluated) {
          out << "imag " << (rep.imag_holds ? "holds" : "fails") << " margin "
              << fmt6(rep.imag_margin) << "\n";
        } else {
          out << "imag outside the disc E^2 + eta^2 <= 4E\n";
        }
        return rep.all_hold() ? 0 : 1;
      }
      return 0;
    }

    if (sample->parsed()) {
      const ExperimentConfig cfg = build_config(sample_flags, "sample");
      EnsembleSpec spec{cfg.sizes.front(), cfg.distribution, cfg.master_seed};
      const MatrixSample m = sample_matrix(spec, trial_index);
      const std::filesystem::path dir = output_dir(sample_flags);
      std::filesystem::create_directories(dir);
      const auto path = dir / ("sample_N" + std::to_string(spec.N) + "_t" +
                               std::to_string(trial_index) + ".bin");
      std::ofstream file(path, std::ios::binary);
      if (!file) throw std::runtime_error("cannot open " + path.string());
      write_sample(file, m);
      out << path.string() << "\n";
      return 0;
    }

    for (const auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      const CommonFlags& f = flags[name];
      const ExperimentConfig cfg = build_config(f, name);
      const TheoremReport report = runners.at(name)(cfg, RunOptions{f.threads});
      const std::filesystem::path dir = output_dir(f);
      const Manifest manifest = write_report(report, dir);
      for (const auto& c : report.checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << " " << format_number(c.value) << " "
            << c.relation << " " << format_number(c.threshold) << "\n";
      }
      out << "manifest " << (dir / (report.theorem + "_manifest.json")).string() << " run "
          << manifest.run_id << "\n";
      return report.passed() ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n\n" << config_schema_help();
    return 2;
  } catch (const ExperimentError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

int run_command(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_command(args, std::cout, std::cerr);
}

}  // namespace hardedge
