#pragma once

// Closed-form Marchenko-Pastur law for square (aspect ratio one) sample
// covariance matrices: density, distribution function, window masses and the
// Stieltjes transform, plus numerical checks of its fixed-point equation.

#include <complex>
#include <functional>

namespace hardedge {

using Complex = std::complex<double>;

/// A point E + i*eta of the open upper half plane.
struct SpectralPoint {
  double E = 0.0;
  double eta = 1.0;

  /// Validating constructor; throws std::invalid_argument unless eta > 0 and
  /// both coordinates are finite.
  static SpectralPoint make(double E, double eta);

  Complex theta() const { return {E, eta}; }
};

/// The closed interval [E, E + eta].
struct Window {
  double E = 0.0;
  double eta = 1.0;

  static Window make(double E, double eta);

  double lower() const { return E; }
  double upper() const { return E + eta; }
  bool contains(double s) const { return s >= E && s <= E + eta; }
};

struct LawEval {
  double density = 0.0;
  double cdf = 0.0;
};

/// Upper edge of the support [0, 4].
inline constexpr double kSoftEdge = 4.0;

/// Default constant in the lower bound on Im Delta inside the disc
/// E^2 + eta^2 <= 4E. Chosen from a dense scan of that disc, see
/// scan_imag_bound_constant().
inline constexpr double kImagBoundConstant = 0.2;

/// (1/2pi) sqrt((4-E)/E) on (0, 4], zero elsewhere. The integrable E^{-1/2}
/// singularity at the origin is reported as 0 (a measure-zero point).
double mp_density(double E);

/// Distribution function F(E) = (t + sin t)/pi with t = arccos(1 - E/2).
double mp_cdf(double E);

LawEval mp_law(double E);

/// Mass of the law inside the window, F(E + eta) - F(E).
double mp_window_mass(const Window& w);

/// Delta(theta) = -1/2 + sqrt(1 - 4/theta)/2 on the branch Re sqrt >= 0.
Complex mp_stieltjes(const SpectralPoint& p);

/// |theta (delta + 1) + 1/delta|. Throws std::invalid_argument on delta == 0.
double fixed_point_residual(Complex delta, const SpectralPoint& p);

/// Integral of f against the law, evaluated in the angle variable
/// E = 2 - 2 cos t where the density becomes (1 + cos t)/pi.
double mp_expectation(const std::function<double(double)>& f,
                      double tolerance = 1e-13);

/// Same as mp_expectation but for the sub-interval [a, b] of the support.
double mp_integrate(const std::function<double(double)>& f, double a, double b,
                    double tolerance = 1e-13);

struct DeltaBoundReport {
  SpectralPoint point;
  // |Delta|^2 <= 1/E
  bool modulus_holds = false;
  double modulus_margin = 0.0;
  // |1 + Delta|^2 >= max(E/(E^2 + eta^2), 1/4)
  bool shift_holds = false;
  double shift_margin = 0.0;
  // Im Delta >= C (|E-4|^{1/2} + eta^{1/2}) / (E^2 + eta^2)^{1/4}, only
  // evaluated inside the disc E^2 + eta^2 <= 4E.
  bool imag_evaluated = false;
  bool imag_holds = true;
  double imag_margin = 0.0;

  bool all_hold() const { return modulus_holds && shift_holds && imag_holds; }
};

/// Margins are (lhs - rhs) oriented so that a nonnegative margin means the
/// bound holds. Throws std::invalid_argument unless E > 0.
DeltaBoundReport check_delta_bounds(const SpectralPoint& p,
                                    double imag_constant = kImagBoundConstant);

/// Smallest ratio Im Delta / ((|E-4|^{1/2} + eta^{1/2}) / (E^2+eta^2)^{1/4})
/// over a polar grid covering the disc E^2 + eta^2 <= 4E (eta > 0).
double scan_imag_bound_constant(int radial = 200, int angular = 200);

}  // namespace hardedge
