#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hardedge/ensemble.hpp"

using namespace hardedge;

TEST_CASE("distribution names") {
  CHECK(parse_distribution("complex-gaussian").kind == EntryKind::ComplexGaussian);
  CHECK(parse_distribution("rademacher").kind == EntryKind::RademacherPair);
  CHECK(parse_distribution("uniform-symmetric").kind == EntryKind::UniformSymmetric);
  const auto real = parse_distribution("real-uniform-symmetric");
  CHECK(real.real_entries);
  CHECK(real.name() == "real-uniform-symmetric");
  CHECK(parse_distribution(parse_distribution("rademacher-pair").name()).kind ==
        EntryKind::RademacherPair);
  CHECK_THROWS_AS(parse_distribution("cauchy"), std::invalid_argument);
  CHECK(parse_distribution("gaussian").bounded_density());
  CHECK(parse_distribution("uniform").bounded_density());
  CHECK_FALSE(parse_distribution("rademacher").bounded_density());
}

TEST_CASE("entry moments per kind") {
  for (const char* name : {"complex-gaussian", "rademacher-pair", "uniform-symmetric",
                           "real-complex-gaussian", "real-uniform-symmetric"}) {
    const EntryDistribution d = parse_distribution(name);
    CounterRng rng(11);
    const int n = 200000;
    double m2 = 0.0, m4 = 0.0;
    std::complex<double> m1 = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto x = d.draw(rng);
      m1 += x;
      m2 += std::norm(x);
      m4 += std::norm(x) * std::norm(x);
    }
    m1 /= n;
    m2 /= n;
    m4 /= n;
    INFO(name);
    CHECK(std::abs(m1) < 0.02);
    CHECK(m2 == doctest::Approx(1.0).epsilon(0.02));
    CHECK(m4 - m2 * m2 == doctest::Approx(d.modulus_square_variance()).epsilon(0.05).scale(1.0));
    if (d.real_entries) CHECK(d.draw(rng).imag() == 0.0);
  }
}

TEST_CASE("modulus-square distribution function against sampling") {
  for (const char* name : {"complex-gaussian", "uniform-symmetric", "real-uniform-symmetric"}) {
    const EntryDistribution d = parse_distribution(name);
    CounterRng rng(5);
    const int n = 100000;
    for (double t : {0.25, 0.5, 1.0, 1.6, 2.5}) {
      CounterRng local(rng.next_u64());
      int below = 0;
      for (int i = 0; i < n; ++i) below += std::norm(d.draw(local)) <= t;
      const double p = d.modulus_square_cdf(t);
      INFO(name << " t=" << t);
      CHECK(std::abs(double(below) / n - p) < 5.0 * std::sqrt(p * (1 - p) / n) + 1e-12);
    }
  }
  const auto u = parse_distribution("uniform-symmetric");
  CHECK(u.modulus_square_cdf(3.0) == 1.0);
  CHECK(u.modulus_square_cdf(-1.0) == 0.0);
}

TEST_CASE("sampling is deterministic and scaled") {
  EnsembleSpec spec{32, {}, 123};
  const MatrixSample a = sample_matrix(spec, 4);
  const MatrixSample b = sample_matrix(spec, 4);
  const MatrixSample c = sample_matrix(spec, 5);
  CHECK(a.entries == b.entries);
  CHECK(a.entries != c.entries);
  CHECK(a.size() == 32);
  CHECK((raw_column(a, 3) - std::sqrt(32.0) * column_vector(a, 3)).norm() < 1e-14);
  const MatrixXc w = remove_column(a, 0);
  CHECK(w.cols() == 31);
  CHECK(w.col(0) == a.entries.col(1));
  CHECK_THROWS_AS(remove_column(a, 32), std::out_of_range);
  CHECK_THROWS_AS(column_vector(a, -1), std::out_of_range);
  CHECK_THROWS_AS(sample_matrix(EnsembleSpec{0, {}, 1}, 0), std::invalid_argument);
  CHECK(entry_statistics(sample_matrix(EnsembleSpec{256, {}, 1}, 0)).plausible);
}

TEST_CASE("binary sample round trip") {
  EnsembleSpec spec{5, parse_distribution("real-uniform-symmetric"), 77};
  const MatrixSample m = sample_matrix(spec, 3);
  std::stringstream buf;
  write_sample(buf, m);
  CHECK(buf.str().size() == 8 + 4 + 8 + 8 + 25 * 16);
  const MatrixSample back = read_sample(buf);
  CHECK(back.entries == m.entries);
  CHECK(back.spec.master_seed == 77);
  CHECK(back.trial_index == 3);
  CHECK(back.spec.distribution.real_entries);
  CHECK(back.spec.distribution.kind == EntryKind::UniformSymmetric);
  std::string s = std::string(buf.str());
  std::stringstream cut(s.substr(0, 40));
  CHECK_THROWS(read_sample(cut));
}
