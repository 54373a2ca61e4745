#include "hardedge/ensemble.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace hardedge {

namespace {

constexpr std::uint32_t kRealFlag = 0x100;

// Half-width of the uniform law with variance v: a^2 / 3 = v.
double uniform_half_width(double variance) { return std::sqrt(3.0 * variance); }

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little,
                "binary dump assumes a little-endian host");
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.write(bytes, sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  char bytes[sizeof(T)];
  in.read(bytes, sizeof(T));
  if (!in) throw std::runtime_error("read_sample: truncated input");
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

std::string EntryDistribution::name() const {
  std::string base;
  switch (kind) {
    case EntryKind::ComplexGaussian: base = "complex-gaussian"; break;
    case EntryKind::RademacherPair: base = "rademacher-pair"; break;
    case EntryKind::UniformSymmetric: base = "uniform-symmetric"; break;
  }
  return real_entries ? "real-" + base : base;
}

bool EntryDistribution::bounded_density() const { return kind != EntryKind::RademacherPair; }

double EntryDistribution::subgaussian_delta0() const {
  if (kind == EntryKind::ComplexGaussian) return real_entries ? 0.25 : 0.5;
  return 1.0;
}

double EntryDistribution::modulus_square_variance() const {
  switch (kind) {
    case EntryKind::ComplexGaussian: return real_entries ? 2.0 : 1.0;
    case EntryKind::RademacherPair: return 0.0;
    case EntryKind::UniformSymmetric: return real_entries ? 0.8 : 0.4;
  }
  return 0.0;
}

double EntryDistribution::modulus_square_cdf(double t) const {
  if (t < 0.0) return 0.0;
  switch (kind) {
    case EntryKind::ComplexGaussian:
      return real_entries ? std::erf(std::sqrt(0.5 * t)) : -std::expm1(-t);
    case EntryKind::RademacherPair:
      return t >= 1.0 ? 1.0 : 0.0;
    case EntryKind::UniformSymmetric: {
      if (real_entries) return std::min(1.0, std::sqrt(t / 3.0));
      // |x|^2 = (3/2)(U1^2 + U2^2), U uniform on [-1, 1]: disc of radius r
      // intersected with the square, divided by its area.
      const double r2 = t / 1.5;
      if (r2 >= 2.0) return 1.0;
      if (r2 <= 1.0) return std::numbers::pi * r2 / 4.0;
      const double r = std::sqrt(r2);
      return std::sqrt(r2 - 1.0) + 0.5 * r2 * (std::asin(1.0 / r) - std::acos(1.0 / r));
    }
  }
  return 0.0;
}

double EntryDistribution::draw_part(CounterRng& rng) const {
  const double variance = real_entries ? 1.0 : 0.5;
  switch (kind) {
    case EntryKind::ComplexGaussian:
      return std::sqrt(variance) * rng.normal();
    case EntryKind::RademacherPair:
      return (rng.next_u64() >> 63) ? std::sqrt(variance) : -std::sqrt(variance);
    case EntryKind::UniformSymmetric:
      return uniform_half_width(variance) * (2.0 * rng.uniform() - 1.0);
  }
  return 0.0;
}

std::complex<double> EntryDistribution::draw(CounterRng& rng) const {
  const double re = draw_part(rng);
  if (real_entries) return {re, 0.0};
  const double im = draw_part(rng);
  return {re, im};
}

EntryDistribution parse_distribution(std::string_view name) {
  EntryDistribution d;
  constexpr std::string_view prefix = "real-";
  if (name.substr(0, prefix.size()) == prefix) {
    d.real_entries = true;
    name.remove_prefix(prefix.size());
  }
  if (name == "complex-gaussian" || name == "gaussian") {
    d.kind = EntryKind::ComplexGaussian;
  } else if (name == "rademacher-pair" || name == "rademacher") {
    d.kind = EntryKind::RademacherPair;
  } else if (name == "uniform-symmetric" || name == "uniform") {
    d.kind = EntryKind::UniformSymmetric;
  } else {
    throw std::invalid_argument("unknown entry distribution '" + std::string(name) + "'");
  }
  return d;
}

void EnsembleSpec::validate() const {
  if (N < 1) throw std::invalid_argument("EnsembleSpec: N must be >= 1");
}

MatrixSample sample_matrix(const EnsembleSpec& spec, std::uint64_t trial_index) {
  spec.validate();
  CounterRng rng(derive_trial_seed(spec.master_seed, trial_index));
  const Eigen::Index n = spec.N;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  MatrixSample m;
  m.spec = spec;
  m.trial_index = trial_index;
  m.entries.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      m.entries(i, j) = scale * spec.distribution.draw(rng);
    }
  }
  return m;
}

MatrixSample make_sample(MatrixXc entries, std::uint64_t trial_index) {
  if (entries.rows() != entries.cols() || entries.rows() < 1) {
    throw std::invalid_argument("make_sample: need a nonempty square matrix");
  }
  MatrixSample m;
  m.spec.N = entries.rows();
  m.entries = std::move(entries);
  m.trial_index = trial_index;
  return m;
}

namespace {
void check_column(const MatrixSample& m, Eigen::Index k, const char* who) {
  if (k < 0 || k >= m.size()) {
    throw std::out_of_range(std::string(who) + ": column index " + std::to_string(k) +
                            " outside [0, " + std::to_string(m.size()) + ")");
  }
}
}  // namespace

MatrixXc remove_column(const MatrixSample& m, Eigen::Index k) {
  check_column(m, k, "remove_column");
  const Eigen::Index n = m.size();
  MatrixXc w(n, n - 1);
  w.leftCols(k) = m.entries.leftCols(k);
  w.rightCols(n - 1 - k) = m.entries.rightCols(n - 1 - k);
  return w;
}

VectorXc column_vector(const MatrixSample& m, Eigen::Index k) {
  check_column(m, k, "column_vector");
  return m.entries.col(k);
}

VectorXc raw_column(const MatrixSample& m, Eigen::Index k) {
  return std::sqrt(static_cast<double>(m.size())) * column_vector(m, k);
}

EntryStatistics entry_statistics(const MatrixSample& m) {
  const double n = static_cast<double>(m.size());
  const double count = n * n;
  const double unscale = std::sqrt(n);
  std::complex<double> sum = 0.0;
  double sq = 0.0;
  for (Eigen::Index j = 0; j < m.entries.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.entries.rows(); ++i) {
      const auto x = unscale * m.entries(i, j);
      sum += x;
      sq += std::norm(x);
    }
  }
  EntryStatistics s;
  s.mean = sum / count;
  s.second_moment = sq / count;
  s.plausible = std::abs(s.mean) <= 5.0 / std::sqrt(2.0 * count) &&
                std::abs(s.second_moment - 1.0) <= 10.0 / std::sqrt(count);
  return s;
}

void write_sample(std::ostream& out, const MatrixSample& m) {
  const auto& d = m.spec.distribution;
  std::uint32_t kind = static_cast<std::uint32_t>(d.kind);
  if (d.real_entries) kind |= kRealFlag;
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.size()));
  put_le<std::uint32_t>(out, kind);
  put_le<std::uint64_t>(out, m.spec.master_seed);
  put_le<std::uint64_t>(out, m.trial_index);
  for (Eigen::Index i = 0; i < m.entries.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.entries.cols(); ++j) {
      put_le<double>(out, m.entries(i, j).real());
      put_le<double>(out, m.entries(i, j).imag());
    }
  }
  if (!out) throw std::runtime_error("write_sample: stream error");
}

MatrixSample read_sample(std::istream& in) {
  const auto n = get_le<std::uint64_t>(in);
  const auto kind = get_le<std::uint32_t>(in);
  MatrixSample m;
  m.spec.N = static_cast<std::int64_t>(n);
  m.spec.distribution.real_entries = (kind & kRealFlag) != 0;
  const std::uint32_t code = kind & ~kRealFlag;
  if (code > 2 || n < 1) throw std::runtime_error("read_sample: bad header");
  m.spec.distribution.kind = static_cast<EntryKind>(code);
  m.spec.master_seed = get_le<std::uint64_t>(in);
  m.trial_index = get_le<std::uint64_t>(in);
  m.entries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < m.entries.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.entries.cols(); ++j) {
      const double re = get_le<double>(in);
      const double im = get_le<double>(in);
      m.entries(i, j) = {re, im};
    }
  }
  return m;
}

}  // namespace hardedge
