#include "hardedge/mp_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace hardedge {

namespace {

constexpr double kPi = std::numbers::pi;

// Angle t in [0, pi] with E = 2 - 2 cos t = 4 sin^2(t/2).
double angle_of(double E) {
  const double x = std::clamp(0.5 * std::sqrt(std::max(E, 0.0)), 0.0, 1.0);
  return 2.0 * std::asin(x);
}

}  // namespace

SpectralPoint SpectralPoint::make(double E, double eta) {
  if (!std::isfinite(E) || !std::isfinite(eta)) {
    throw std::invalid_argument("SpectralPoint: coordinates must be finite");
  }
  if (!(eta > 0.0)) {
    throw std::invalid_argument("SpectralPoint: eta must be > 0, got " +
                                std::to_string(eta));
  }
  return SpectralPoint{E, eta};
}

Window Window::make(double E, double eta) {
  if (!std::isfinite(E) || !std::isfinite(eta)) {
    throw std::invalid_argument("Window: endpoints must be finite");
  }
  if (!(eta > 0.0)) {
    throw std::invalid_argument("Window: width must be > 0, got " +
                                std::to_string(eta));
  }
  return Window{E, eta};
}

double mp_density(double E) {
  if (!(E > 0.0) || E > kSoftEdge) return 0.0;
  return std::sqrt((kSoftEdge - E) / E) / (2.0 * kPi);
}

double mp_cdf(double E) {
  if (!(E > 0.0)) return 0.0;
  if (E >= kSoftEdge) return 1.0;
  const double t = angle_of(E);
  return (t + std::sin(t)) / kPi;
}

LawEval mp_law(double E) { return {mp_density(E), mp_cdf(E)}; }

double mp_window_mass(const Window& w) {
  // F(b) - F(a) cancels catastrophically for thin windows, so the difference
  // is formed directly from the half-angle increment.
  const double a = std::clamp(w.lower(), 0.0, kSoftEdge);
  const double b = std::clamp(w.upper(), 0.0, kSoftEdge);
  if (b <= a) return 0.0;
  const bool clipped = a != w.lower() || b != w.upper();
  const double width = clipped ? b - a : w.eta;
  // With E = 4 sin^2(t/2), sin((tb - ta)/2) = (b - a) / (sqrt(b(4-a)) + sqrt(a(4-b))).
  const double h = width / (std::sqrt(b * (kSoftEdge - a)) + std::sqrt(a * (kSoftEdge - b)));
  const double half = std::asin(std::min(h, 1.0));
  const double ta = angle_of(a);
  // (t + sin t) difference written as dt + 2 cos((ta+tb)/2) sin(dt/2).
  const double mass = (2.0 * half + 2.0 * std::cos(ta + half) * std::sin(half)) / kPi;
  return std::clamp(mass, 0.0, 1.0);
}

Complex mp_stieltjes(const SpectralPoint& p) {
  if (!(p.eta > 0.0)) {
    throw std::invalid_argument("mp_stieltjes: eta must be > 0");
  }
  const Complex theta = p.theta();
  Complex root = std::sqrt((theta - 4.0) / theta);
  if (root.real() < 0.0) root = -root;
  // -1/2 + root/2 rewritten without cancellation for large |theta|.
  const Complex delta = -2.0 / (theta * (1.0 + root));
  if (!(delta.imag() > 0.0)) {
    throw std::logic_error("mp_stieltjes: branch selection produced Im <= 0");
  }
  return delta;
}

double fixed_point_residual(Complex delta, const SpectralPoint& p) {
  if (delta == Complex(0.0, 0.0)) {
    throw std::invalid_argument("fixed_point_residual: delta must be nonzero");
  }
  const Complex theta = p.theta();
  return std::abs(theta * (delta + 1.0) + 1.0 / delta);
}

double mp_integrate(const std::function<double(double)>& f, double a, double b,
                    double tolerance) {
  a = std::clamp(a, 0.0, kSoftEdge);
  b = std::clamp(b, 0.0, kSoftEdge);
  if (b <= a) return 0.0;
  const double ta = angle_of(a);
  const double tb = angle_of(b);
  auto integrand = [&f](double t) {
    const double h = std::sin(0.5 * t);
    return f(4.0 * h * h) * (1.0 + std::cos(t)) / kPi;
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, ta, tb, 15, tolerance);
}

double mp_expectation(const std::function<double(double)>& f, double tolerance) {
  return mp_integrate(f, 0.0, kSoftEdge, tolerance);
}

DeltaBoundReport check_delta_bounds(const SpectralPoint& p, double imag_constant) {
  if (!(p.E > 0.0)) {
    throw std::invalid_argument("check_delta_bounds: E must be > 0");
  }
  const double E = p.E;
  const double eta = p.eta;
  const Complex delta = mp_stieltjes(p);
  const double r2 = E * E + eta * eta;

  DeltaBoundReport out;
  out.point = p;
  out.modulus_margin = 1.0 / E - std::norm(delta);
  out.modulus_holds = out.modulus_margin >= 0.0;

  out.shift_margin = std::norm(1.0 + delta) - std::max(E / r2, 0.25);
  out.shift_holds = out.shift_margin >= 0.0;

  if (r2 <= 4.0 * E) {
    out.imag_evaluated = true;
    const double rhs = imag_constant *
                       (std::sqrt(std::abs(E - 4.0)) + std::sqrt(eta)) /
                       std::pow(r2, 0.25);
    out.imag_margin = delta.imag() - rhs;
    out.imag_holds = out.imag_margin >= 0.0;
  }
  return out;
}

double scan_imag_bound_constant(int radial, int angular) {
  // Disc of radius 2 centred at (2, 0), upper half only.
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= radial; ++i) {
    const double r = 2.0 * static_cast<double>(i) / radial;
    for (int j = 1; j < angular; ++j) {
      const double phi = kPi * static_cast<double>(j) / angular;
      const double E = 2.0 + r * std::cos(phi);
      const double eta = r * std::sin(phi);
      if (!(E > 0.0) || !(eta > 0.0) || E * E + eta * eta > 4.0 * E) continue;
      const double shape = (std::sqrt(std::abs(E - 4.0)) + std::sqrt(eta)) /
                           std::pow(E * E + eta * eta, 0.25);
      const double ratio = mp_stieltjes({E, eta}).imag() / shape;
      worst = std::min(worst, ratio);
    }
  }
  return worst;
}

}  // namespace hardedge
