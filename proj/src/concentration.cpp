#include "hardedge/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/QR>

#include "hardedge/parallel.hpp"
#include "hardedge/rng.hpp"
#include "hardedge/stats.hpp"

namespace hardedge {

QuadraticKernel QuadraticKernel::dense(MatrixXc a) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw std::invalid_argument("QuadraticKernel::dense: need a nonempty square matrix");
  }
  QuadraticKernel k;
  k.dense_ = true;
  k.matrix_ = std::move(a);
  return k;
}

QuadraticKernel QuadraticKernel::spectral(VectorXc eigenvalues, MatrixXc basis) {
  if (eigenvalues.size() < 1) {
    throw std::invalid_argument("QuadraticKernel::spectral: empty spectrum");
  }
  if (basis.size() != 0 &&
      (basis.rows() != eigenvalues.size() || basis.cols() != eigenvalues.size())) {
    throw std::invalid_argument("QuadraticKernel::spectral: basis shape mismatch");
  }
  QuadraticKernel k;
  k.dense_ = false;
  k.eigenvalues_ = std::move(eigenvalues);
  k.basis_ = std::move(basis);
  return k;
}

Eigen::Index QuadraticKernel::size() const {
  return dense_ ? matrix_.rows() : eigenvalues_.size();
}

double QuadraticKernel::frobenius_squared() const {
  return dense_ ? matrix_.squaredNorm() : eigenvalues_.squaredNorm();
}

Complex QuadraticKernel::trace() const {
  return dense_ ? matrix_.trace() : eigenvalues_.sum();
}

Complex QuadraticKernel::centred_form(const VectorXc& x) const {
  if (x.size() != size()) throw std::invalid_argument("centred_form: dimension mismatch");
  if (dense_) {
    const Complex raw = (x.transpose() * (matrix_ * x.conjugate()))(0, 0);
    return raw - trace();
  }
  // x^T U diag(l) U^H conj(x) = sum_i l_i |(U^T x)_i|^2.
  CompensatedSum<Complex> sum;
  if (basis_.size() == 0) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      sum.add(eigenvalues_(i) * (std::norm(x(i)) - 1.0));
    }
    return sum.value();
  }
  const VectorXc c = basis_.transpose() * x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sum.add(eigenvalues_(i) * (std::norm(c(i)) - 1.0));
  }
  return sum.value();
}

TailCurve hw_tail_curve(const QuadraticKernel& a, const EntryDistribution& dist,
                        std::int64_t trials, std::vector<double> deltas, std::uint64_t seed,
                        int threads) {
  if (trials < 100) throw std::invalid_argument("hw_tail_curve: trials must be >= 100");
  const double tr_aa = a.frobenius_squared();
  if (!(tr_aa > 0.0)) throw std::invalid_argument("hw_tail_curve: degenerate kernel (Tr A*A = 0)");
  for (double d : deltas) {
    if (!(d >= 0.0)) throw std::invalid_argument("hw_tail_curve: deltas must be >= 0");
  }
  std::sort(deltas.begin(), deltas.end());

  const Eigen::Index n = a.size();
  std::vector<Complex> forms(static_cast<std::size_t>(trials));
  parallel_for(forms.size(), threads, [&](std::size_t t) {
    CounterRng rng(derive_trial_seed(seed, t));
    VectorXc x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = dist.draw(rng);
    forms[t] = a.centred_form(x);
  });

  std::vector<double> moduli(forms.size());
  std::transform(forms.begin(), forms.end(), moduli.begin(),
                 [](Complex z) { return std::abs(z); });
  std::sort(moduli.begin(), moduli.end());

  TailCurve curve;
  curve.deltas = deltas;
  curve.trials = trials;
  curve.normalizer = tr_aa;
  std::vector<double> fit_x, fit_y;
  for (double d : deltas) {
    const auto above = static_cast<std::int64_t>(
        moduli.end() - std::lower_bound(moduli.begin(), moduli.end(), d));
    const double p = static_cast<double>(above) / static_cast<double>(trials);
    const Interval ci = wilson_interval(above, trials);
    curve.exceedance.push_back(p);
    curve.ci_lo.push_back(ci.lo);
    curve.ci_hi.push_back(ci.hi);
    if (p > 0.0 && d > 0.0) {
      fit_x.push_back(std::min(d / std::sqrt(tr_aa), d * d / tr_aa));
      fit_y.push_back(-std::log(p));
    }
  }
  if (fit_x.size() >= 2 && fit_x.front() != fit_x.back()) {
    const LinearFit fit = linear_fit(fit_x, fit_y);
    curve.slope = fit.slope;
    curve.intercept = fit.intercept;
    curve.fit_points = fit.points;
  }

  CompensatedSum<Complex> sum;
  for (Complex z : forms) sum.add(z);
  const Complex m = sum.value() / static_cast<double>(forms.size());
  CompensatedSum<double> var;
  for (Complex z : forms) var.add(std::norm(z - m));
  curve.form_mean_re = m.real();
  curve.form_variance = var.value() / static_cast<double>(forms.size() - 1);
  return curve;
}

std::string to_string(ProjectionFamily f) {
  switch (f) {
    case ProjectionFamily::Automatic: return "automatic";
    case ProjectionFamily::Coordinate: return "coordinate";
    case ProjectionFamily::Haar: return "haar";
  }
  return "?";
}

std::string to_string(ProjectionEstimator e) {
  return e == ProjectionEstimator::Plain ? "plain" : "tilted";
}

namespace {

bool is_complex_gaussian(const EntryDistribution& d) {
  return d.kind == EntryKind::ComplexGaussian && !d.real_entries;
}

// Orthonormal basis of a uniformly random m-dimensional subspace of C^n.
MatrixXc haar_frame(Eigen::Index n, Eigen::Index m, CounterRng& rng) {
  MatrixXc g(n, m);
  const double s = std::sqrt(0.5);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = {s * rng.normal(), s * rng.normal()};
  }
  Eigen::HouseholderQR<MatrixXc> qr(g);
  return qr.householderQ() * MatrixXc::Identity(n, m);
}

}  // namespace

ProjectionMassResult projection_mass_probe(std::int64_t m, std::int64_t n,
                                           const EntryDistribution& dist, std::int64_t trials,
                                           std::uint64_t seed, const ProjectionOptions& options) {
  if (n < 1 || m < 1 || m > n) {
    throw std::invalid_argument("projection_mass_probe: need 1 <= m <= N");
  }
  if (trials < 1) throw std::invalid_argument("projection_mass_probe: trials must be >= 1");

  ProjectionFamily family = options.family;
  if (family == ProjectionFamily::Automatic) {
    family = is_complex_gaussian(dist) ? ProjectionFamily::Coordinate : ProjectionFamily::Haar;
  }
  if (options.estimator == ProjectionEstimator::Tilted &&
      (!is_complex_gaussian(dist) || family != ProjectionFamily::Coordinate)) {
    throw std::invalid_argument(
        "projection_mass_probe: the tilted estimator needs complex-gaussian entries and "
        "coordinate vectors");
  }

  const double threshold = 0.5 * static_cast<double>(m);
  std::vector<double> weights(static_cast<std::size_t>(trials));
  std::vector<char> hit(static_cast<std::size_t>(trials));
  parallel_for(weights.size(), options.threads, [&](std::size_t t) {
    CounterRng rng(derive_trial_seed(seed, t));
    double mass = 0.0;
    double weight = 1.0;
    if (options.estimator == ProjectionEstimator::Tilted) {
      // Proposal: complex gaussian with E|x|^2 = 1/2; only the m projected
      // coordinates matter for the event.
      const double s = 0.5;
      for (std::int64_t i = 0; i < m; ++i) {
        const double re = s * rng.normal();
        const double im = s * rng.normal();
        mass += re * re + im * im;
      }
      weight = std::exp(mass - static_cast<double>(m) * std::numbers::ln2);
    } else if (family == ProjectionFamily::Coordinate) {
      // Draw all n entries so the stream matches the Haar path's vector.
      for (std::int64_t i = 0; i < n; ++i) {
        const Complex x = dist.draw(rng);
        if (i < m) mass += std::norm(x);
      }
    } else {
      VectorXc x(n);
      for (std::int64_t i = 0; i < n; ++i) x(i) = dist.draw(rng);
      const MatrixXc frame = haar_frame(n, m, rng);
      mass = (frame.adjoint() * x).squaredNorm();
    }
    hit[t] = mass <= threshold ? 1 : 0;
    weights[t] = hit[t] ? weight : 0.0;
  });

  ProjectionMassResult out;
  out.m = m;
  out.n = n;
  out.trials = trials;
  out.family = family;
  out.estimator = options.estimator;
  for (char h : hit) out.hits += h;
  if (options.estimator == ProjectionEstimator::Plain) {
    out.probability = static_cast<double>(out.hits) / static_cast<double>(trials);
    const Interval ci = wilson_interval(out.hits, trials);
    out.ci_lo = ci.lo;
    out.ci_hi = ci.hi;
  } else {
    out.probability = mean(weights);
    const double se = trials > 1 ? std::sqrt(variance(weights) / static_cast<double>(trials)) : 0.0;
    out.ci_lo = std::max(0.0, out.probability - 1.959963984540054 * se);
    out.ci_hi = std::min(1.0, out.probability + 1.959963984540054 * se);
  }
  return out;
}

}  // namespace hardedge
