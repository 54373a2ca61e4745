#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hardedge/cli.hpp"
#include "hardedge/concentration.hpp"
#include "hardedge/config.hpp"
#include "hardedge/experiments.hpp"
#include "hardedge/mp_law.hpp"
#include "hardedge/report.hpp"
#include "hardedge/resolvent.hpp"
#include "hardedge/spectral.hpp"

namespace py = pybind11;
using namespace hardedge;

namespace {

TheoremReport run_named(const std::string& name, const std::string& config_json, int threads) {
  const ExperimentConfig cfg = config_from_json(nlohmann::json::parse(config_json));
  const RunOptions opts{threads};
  py::gil_scoped_release release;
  if (name == "apriori") return run_apriori(cfg, opts);
  if (name == "locallaw") return run_local_law(cfg, opts);
  if (name == "deloc") return run_delocalization(cfg, opts);
  if (name == "wegner") return run_wegner(cfg, opts);
  if (name == "hardedge") return run_hard_edge_scaling(cfg, opts);
  if (name == "hw") return run_hw(cfg, opts);
  if (name == "projmass") return run_projmass(cfg, opts);
  if (name == "identities") return run_identities(cfg, opts);
  throw std::invalid_argument("unknown experiment " + name);
}

}  // namespace

PYBIND11_MODULE(_hardedge, m) {
  m.doc() = "C++ core of the hardedge package";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ExperimentError>(m, "ExperimentError", PyExc_ValueError);
  py::register_exception<DecompositionError>(m, "DecompositionError", PyExc_RuntimeError);

  m.def("mp_density", &mp_density, py::arg("E"));
  m.def("mp_cdf", &mp_cdf, py::arg("E"));
  m.def("mp_window_mass",
        [](double E, double eta) { return mp_window_mass(Window::make(E, eta)); },
        py::arg("E"), py::arg("eta"));
  m.def("mp_stieltjes",
        [](double E, double eta) { return mp_stieltjes(SpectralPoint::make(E, eta)); },
        py::arg("E"), py::arg("eta"));
  m.def("fixed_point_residual",
        [](Complex delta, double E, double eta) {
          return fixed_point_residual(delta, SpectralPoint::make(E, eta));
        },
        py::arg("delta"), py::arg("E"), py::arg("eta"));
  m.def("mp_expectation",
        [](const std::function<double(double)>& f, double tol) { return mp_expectation(f, tol); },
        py::arg("f"), py::arg("tolerance") = 1e-13);
  m.def("check_delta_bounds",
        [](double E, double eta, double c) {
          const auto r = check_delta_bounds(SpectralPoint::make(E, eta), c);
          py::dict d;
          d["modulus_holds"] = r.modulus_holds;
          d["modulus_margin"] = r.modulus_margin;
          d["shift_holds"] = r.shift_holds;
          d["shift_margin"] = r.shift_margin;
          d["imag_evaluated"] = r.imag_evaluated;
          d["imag_holds"] = r.imag_holds;
          d["imag_margin"] = r.imag_margin;
          return d;
        },
        py::arg("E"), py::arg("eta"), py::arg("imag_constant") = kImagBoundConstant);

  m.def("philox4x32_10", &philox4x32_10, py::arg("counter"), py::arg("key"));
  m.def("derive_trial_seed", &derive_trial_seed, py::arg("master_seed"), py::arg("trial_index"));
  m.def("sample_matrix",
        [](std::int64_t n, std::uint64_t seed, std::uint64_t trial, const std::string& dist) {
          return sample_matrix(EnsembleSpec{n, parse_distribution(dist), seed}, trial).entries;
        },
        py::arg("n"), py::arg("seed") = 0, py::arg("trial") = 0,
        py::arg("distribution") = "complex-gaussian",
        "X / sqrt(N) for the given seed and trial index.");

  m.def("decompose",
        [](const MatrixXc& x, bool with_vectors) {
          const SpectralDecomposition d = decompose(make_sample(x), with_vectors);
          return py::make_tuple(d.eigenvalues, d.eigenvectors);
        },
        py::arg("x"), py::arg("with_vectors") = true,
        "Ascending eigenvalues of X^*X and (optionally) eigenvectors as columns.");
  m.def("empirical_stieltjes",
        [](const Eigen::VectorXd& s, double E, double eta) {
          return empirical_stieltjes(std::span<const double>(s.data(), s.size()),
                                     SpectralPoint::make(E, eta));
        },
        py::arg("eigenvalues"), py::arg("E"), py::arg("eta"));
  m.def("count_in_window",
        [](const Eigen::VectorXd& s, double E, double eta) {
          return count_in_range(std::span<const double>(s.data(), s.size()), E, E + eta);
        },
        py::arg("sorted_eigenvalues"), py::arg("E"), py::arg("eta"));
  m.def("counting_bound",
        [](const Eigen::VectorXd& s, double E, double eta) {
          SpectralDecomposition d;
          d.eigenvalues = s;
          return counting_bound(d, Window::make(E, eta));
        },
        py::arg("eigenvalues"), py::arg("E"), py::arg("eta"));
  m.def("resolvent_diag_leave_one_out",
        [](const MatrixXc& x, Eigen::Index k, double E, double eta) {
          return resolvent_diag_leave_one_out(make_sample(x), k, SpectralPoint::make(E, eta));
        },
        py::arg("x"), py::arg("k"), py::arg("E"), py::arg("eta"));
  m.def("resolvent_diag_schur",
        [](const MatrixXc& x, Eigen::Index k, double E, double eta) {
          return resolvent_diag_schur(make_sample(x), k, SpectralPoint::make(E, eta));
        },
        py::arg("x"), py::arg("k"), py::arg("E"), py::arg("eta"));
  m.def("omega_terms",
        [](const MatrixXc& x, double E, double eta) {
          const ErrorTerms t = omega_terms(make_sample(x), SpectralPoint::make(E, eta));
          py::dict d;
          d["omegas"] = t.omegas;
          d["fluctuation"] = t.fluctuation;
          d["trace_shift"] = t.trace_shift;
          d["trace_shift_bound"] = t.trace_shift_bound;
          return d;
        },
        py::arg("x"), py::arg("E"), py::arg("eta"));
  m.def("eigenvector_identity_residual",
        [](const MatrixXc& x, Eigen::Index alpha, Eigen::Index k) {
          const MatrixSample s = make_sample(x);
          const auto e = eigenvector_identity_residual(s, decompose(s, true), alpha, k);
          py::dict d;
          d["lhs"] = e.lhs;
          d["rhs"] = e.rhs;
          d["residual"] = e.residual;
          d["min_gap"] = e.min_gap;
          d["covered"] = e.covered;
          return d;
        },
        py::arg("x"), py::arg("alpha"), py::arg("k"));

  m.def("projection_mass_probe",
        [](std::int64_t mm, std::int64_t n, const std::string& dist, std::int64_t trials,
           std::uint64_t seed, bool tilted) {
          ProjectionOptions o;
          if (tilted) o.estimator = ProjectionEstimator::Tilted;
          const auto r = projection_mass_probe(mm, n, parse_distribution(dist), trials, seed, o);
          return py::make_tuple(r.probability, r.ci_lo, r.ci_hi);
        },
        py::arg("m"), py::arg("n"), py::arg("distribution") = "complex-gaussian",
        py::arg("trials") = 10000, py::arg("seed") = 0, py::arg("tilted") = false);

  m.def("_normalize_config", [](const std::string& text) {
    return config_to_json(config_from_json(nlohmann::json::parse(text))).dump();
  });
  m.def("_run", [](const std::string& name, const std::string& config, int threads) {
    return run_named(name, config, threads).to_json().dump();
  });
  m.def("_run_and_write",
        [](const std::string& name, const std::string& config, const std::string& outdir,
           int threads) {
          return write_report(run_named(name, config, threads), outdir).to_json().dump();
        });
  m.def("run_command",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          int code = 0;
          {
            py::gil_scoped_release release;
            code = run_command(args, out, err);
          }
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line interface; returns (exit code, stdout, stderr).");
}
