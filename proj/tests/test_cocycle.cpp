#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cocycle/accumulator.hpp"
#include "cocycle/philox.hpp"
#include "cocycle/sequence.hpp"
#include "cocycle/trajectory.hpp"
#include "support/quad_oracle.hpp"
#include "support/random_inputs.hpp"

using namespace lyapgap;
using testing_support::random_contraction;
using testing_support::random_matrix;

TEST_CASE("perturbation law and reproducibility") {
  PerturbationModel model{2, 0.3, 987654321u, 7u};

  Matrix a = model.sample(42), b = model.sample(42);
  CHECK((a - b).inf_abs() == 0.0);
  CHECK((model.sample(43) - a).inf_abs() > 0.0);
  CHECK((model.with_stream(8).sample(42) - a).inf_abs() > 0.0);

  PerturbationModel zero{3, 0.0, 1u, 0u};
  CHECK(zero.sample(1).inf_abs() == 0.0);

  // Law: entries in [-eps, eps], mean near 0 at the 3 sigma level.
  double sum = 0.0;
  uint64_t count = 0;
  for (uint64_t n = 1; n <= 250000; ++n) {
    Matrix x = model.sample(n);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        CHECK(std::fabs(x.at(i, j)) <= model.epsilon);
        sum += x.at(i, j);
        ++count;
      }
  }
  double mean = sum / static_cast<double>(count);
  double sigma = model.epsilon / std::sqrt(3.0 * static_cast<double>(count));
  CHECK(std::fabs(mean) <= 3.0 * sigma);
}

TEST_CASE("accumulator identity and exact decay") {
  ProductAccumulator acc(2);
  for (int i = 0; i < 100; ++i) acc.advance(Matrix::identity(2));
  Vec l = acc.log_singular_values();
  CHECK(std::fabs(l[0]) <= 1e-10);
  CHECK(std::fabs(l[1]) <= 1e-10);

  ProductAccumulator dec(2);
  Matrix half = Matrix::diagonal(Vec(2, {0.5, 0.5}));
  for (int i = 0; i < 100000; ++i) dec.advance(half);
  Vec m = dec.log_singular_values();
  const double expect = -100000.0 * std::log(2.0);
  CHECK(std::fabs(m[0] - expect) <= 1e-6 * std::fabs(expect));
  CHECK(std::fabs(m[1] - expect) <= 1e-6 * std::fabs(expect));
}

TEST_CASE("accumulator matches quad-precision product oracle") {
  std::mt19937_64 rng(21);
  for (int d = 2; d <= 4; ++d) {
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<Matrix> factors;
      ProductAccumulator acc(d, 4);
      for (int i = 0; i < 20; ++i) {
        Matrix f = random_matrix(rng, d);
        factors.push_back(f);
        acc.advance(f);
      }
      Vec got = acc.log_singular_values();
      auto want = oracle::qproduct_log_singular_values(factors);
      for (int j = 0; j < d; ++j) {
        CHECK(std::fabs(got[j] - want[static_cast<size_t>(j)]) <=
              1e-8 * std::max(1.0, std::fabs(want[static_cast<size_t>(j)])));
      }
    }
  }
}

TEST_CASE("accumulator monotone, stable over 1e6 contractive steps") {
  std::mt19937_64 rng(22);
  const int d = 3;
  ProductAccumulator acc(d);
  std::uniform_real_distribution<double> logu(std::log(1e-8), 0.0);
  for (int i = 0; i < 1000000; ++i) {
    // Singular values in [1e-8, 1] with rotating frames.
    if (i % 5000 == 0) {
      Vec s(d);
      for (int j = 0; j < d; ++j) s[j] = std::exp(logu(rng));
      Matrix q1 = testing_support::random_orthogonal(rng, d);
      Matrix q2 = testing_support::random_orthogonal(rng, d);
      acc.advance(q1 * Matrix::diagonal(s) * q2);
    } else {
      acc.advance(Matrix::plane_rotation(d, 0, 1, 0.3) *
                  Matrix::diagonal(Vec(3, {1.0, 0.5, 1e-4})));
    }
    if (i % 100000 == 0) {
      Vec l = acc.log_singular_values();
      for (int j = 0; j + 1 < d; ++j) CHECK(l[j] >= l[j + 1]);
      CHECK(std::isfinite(l[d - 1]));
    }
  }
  Vec l = acc.log_singular_values();
  CHECK(std::isfinite(l[0]));
  CHECK(std::isfinite(l[d - 1]));
  CHECK(l[0] >= l[d - 1]);
}

TEST_CASE("gap trajectory basics") {
  auto ident = SequenceSource::generator(
      2, "identity", [](uint64_t) { return Matrix::identity(2); });
  PerturbationModel off{2, 0.0, 1u, 0u};
  GapTrajectory t = gap_trajectory(ident, off, 2000, SampleSchedule::geometric(1.5));
  for (const auto& g : t.gaps) CHECK(g[0] == doctest::Approx(0.0).epsilon(1e-12));

  // diag(1, 1e-8) repeated: the gap locks at log(1e8) per step.
  auto stretched = SequenceSource::explicit_list(
      2, {Matrix::diagonal(Vec(2, {1.0, 1e-8}))});
  GapTrajectory s = gap_trajectory(stretched, off, 500, SampleSchedule::every(50));
  for (const auto& g : s.gaps)
    CHECK(g[0] == doctest::Approx(std::log(1e8)).epsilon(1e-12));

  // zero sequence with noise: positivity is the whole point.
  auto zero = SequenceSource::generator(
      2, "zero", [](uint64_t) { return Matrix::zero(2); });
  PerturbationModel on{2, 0.5, 20240601u, 3u};
  GapTrajectory z = gap_trajectory(zero, on, 10000, SampleSchedule::geometric(1.3));
  double est = liminf_proxy(z)[0];
  CHECK(est > 0.0);
}

TEST_CASE("gap trajectory reproducible bit for bit") {
  auto zero = SequenceSource::generator(
      2, "zero", [](uint64_t) { return Matrix::zero(2); });
  PerturbationModel on{2, 0.25, 5u, 17u};
  GapTrajectory a = gap_trajectory(zero, on, 3000, SampleSchedule::geometric(1.4));
  GapTrajectory b = gap_trajectory(zero, on, 3000, SampleSchedule::geometric(1.4));
  REQUIRE(a.steps == b.steps);
  for (size_t i = 0; i < a.gaps.size(); ++i)
    for (size_t j = 0; j < a.gaps[i].size(); ++j)
      CHECK(a.gaps[i][j] == b.gaps[i][j]);
  CHECK(trajectory_to_csv(a) == trajectory_to_csv(b));
}

TEST_CASE("trajectory csv and json round-trip bit exact") {
  auto zero = SequenceSource::generator(
      3, "zero", [](uint64_t) { return Matrix::zero(3); });
  PerturbationModel on{3, 0.7 - 0.2, 99u, 0u};
  GapTrajectory t = gap_trajectory(zero, on, 700, SampleSchedule::geometric(1.6));

  GapTrajectory c = trajectory_from_csv(trajectory_to_csv(t));
  REQUIRE(c.steps == t.steps);
  for (size_t i = 0; i < t.gaps.size(); ++i)
    for (size_t j = 0; j < t.gaps[i].size(); ++j)
      CHECK(c.gaps[i][j] == t.gaps[i][j]);

  GapTrajectory jt = trajectory_from_json(trajectory_to_json(t));
  REQUIRE(jt.steps == t.steps);
  for (size_t i = 0; i < t.gaps.size(); ++i)
    for (size_t j = 0; j < t.gaps[i].size(); ++j)
      CHECK(jt.gaps[i][j] == t.gaps[i][j]);
}

TEST_CASE("prefix invariance") {
  // Unperturbed repeated diag(1, 1/2): both estimates equal log 2 exactly.
  auto geo = SequenceSource::explicit_list(
      2, {Matrix::diagonal(Vec(2, {1.0, 0.5}))});
  PerturbationModel off{2, 0.0, 0u, 0u};
  for (uint64_t m : {0ull, 7ull, 64ull}) {
    auto r = prefix_invariance_check(geo, off, m, 4000, 1,
                                     SampleSchedule::geometric(1.5));
    CHECK(r.gap_full == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(r.gap_shifted == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }

  // Perturbed random sequence: difference controlled by the prefix constants.
  std::mt19937_64 rng(23);
  std::vector<Matrix> mats;
  for (int i = 0; i < 37; ++i) mats.push_back(random_contraction(rng, 2));
  auto seq = SequenceSource::explicit_list(2, mats, true, "random37");
  PerturbationModel on{2, 0.3, 424242u, 1u};
  const uint64_t m = 100, n_max = 100000;
  auto r = prefix_invariance_check(seq, on, m, n_max, 1,
                                   SampleSchedule::geometric(1.25));
  const double spread = r.prefix_log_max - r.prefix_log_min;
  CHECK(spread >= 0.0);
  const double n_min_window = static_cast<double>(n_max) / 2.0;
  const double bound = 2.0 * spread / n_min_window +
                       static_cast<double>(m) / (n_min_window - static_cast<double>(m)) *
                           std::fabs(r.gap_shifted) +
                       1e-10;
  CHECK(std::fabs(r.gap_full - r.gap_shifted) <= bound);

  CHECK_THROWS_AS(prefix_invariance_check(seq, on, 50, 50), Error);
}

TEST_CASE("accumulator input validation") {
  ProductAccumulator acc(2);
  Matrix bad(2);
  bad.at(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(acc.advance(bad), Error);
  CHECK_THROWS_AS(acc.advance(Matrix::identity(3)), Error);
}
