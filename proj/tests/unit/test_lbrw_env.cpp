#include <doctest.h>

#include <cmath>
#include <random>

#include "lbrw_env.hpp"
#include "lineage_walk.hpp"
#include "stats_verify.hpp"

using namespace llab;

namespace {

LbrwParams nn_params(double m = 2.0, double lambda0 = 0.05) {
  LbrwParams p;
  p.d = 1;
  p.m = m;
  p.lambda0 = lambda0;
  p.p_mig = LbrwParams::nearest_neighbour(1);
  return p;
}

Vec v1(std::int64_t x) { return Vec{x, 0, 0}; }

double poisson_pmf(double mu, std::uint32_t k) { return std::exp(-mu + k * std::log(mu) - std::lgamma(k + 1.0)); }

}  // namespace

TEST_CASE("mean offspring") {
  LbrwParams p = nn_params(2.0, 1.0);
  PopState z(1, 11, -5);
  CHECK(mean_offspring(p, z, v1(0)) == 0.0);
  z.set(v1(0), 1);
  CHECK(mean_offspring(p, z, v1(0)) == doctest::Approx(1.0));
  z.set(v1(0), 5);
  CHECK(mean_offspring(p, z, v1(0)) == 0.0);
}

TEST_CASE("offspring mean is nonincreasing in competitor counts") {
  LbrwParams p = nn_params(2.5, 0.05);
  p.lambda = {{v1(-1), 0.02}, {v1(1), 0.02}};
  PopState z(1, 9, -4);
  for (std::uint32_t own = 0; own <= 8; ++own)
    for (std::uint32_t left = 0; left < 12; ++left) {
      z.set(v1(0), own);
      z.set(v1(-1), left);
      z.set(v1(1), 3);
      const double a = mean_offspring(p, z, v1(0));
      z.set(v1(-1), left + 1);
      CHECK(mean_offspring(p, z, v1(0)) <= a);
    }
}

TEST_CASE("parameter checks") {
  LbrwParams p = nn_params();
  CHECK_NOTHROW(p.validate());
  CHECK(p.warnings().empty());
  p.m = 3.5;
  CHECK_FALSE(p.warnings().empty());
  p.p_mig = {{v1(0), 0.5}, {v1(1), 0.5}};
  CHECK_THROWS(p.validate());
  p = nn_params();
  p.lambda0 = 0;
  CHECK_THROWS(p.validate());
}

TEST_CASE("zero state is absorbing") {
  const LbrwParams p = nn_params();
  const UniformField U(1, medium_stream(1));
  const PopState z(1, 20, 0);
  CHECK(step_population(p, z, U).extinct());
  const PopTrajectory t = burn_in(p, z, U, 10);
  CHECK(t.extinct);
  CHECK(t.back().extinct());
}

TEST_CASE("single-site count is poisson with the superposed mean") {
  // three unit sites with f = 1 each feed the centre with mean 1
  const LbrwParams p = nn_params(2.0, 1.0);
  PopState z(1, 9, -4);
  for (int x = -1; x <= 1; ++x) z.set(v1(x), 1);
  std::vector<std::uint32_t> counts;
  for (std::uint64_t seed = 0; seed < 100000; ++seed) {
    const PopState next = step_population(p, z, UniformField(seed, medium_stream(1)));
    counts.push_back(next.at(v1(0)));
  }
  const Chi2Result r = chi2_counts(counts, [](std::uint32_t k) { return poisson_pmf(1.0, k); });
  CHECK(r.p_value > 0.01);
}

TEST_CASE("flow composition and burn-in bookkeeping") {
  const LbrwParams p = nn_params();
  const UniformField U(9, medium_stream(1));
  PopState init(1, 50, 0);
  for (std::size_t i = 0; i < init.size(); ++i) init[i] = 15 + static_cast<std::uint32_t>(i % 7);
  const PopState two = step_population(p, step_population(p, init, U), U);
  const PopTrajectory t = burn_in(p, init, U, 2, 5);
  CHECK(t.back() == two);
  CHECK(t.slices.size() == 3);
  CHECK(burn_in(p, init, U, 0).back() == init);
  CHECK(t.at_time(1).time == 1);
  CHECK_THROWS_AS(t.at_time(7), WindowUnderflow);
}

TEST_CASE("burn-in reaches a stationary density") {
  const LbrwParams p = nn_params();
  PopState init(1, 200, 0);
  for (std::size_t i = 0; i < init.size(); ++i) init[i] = 30;
  const UniformField U(4, medium_stream(1));
  const PopTrajectory a = burn_in(p, init, U, 500), b = burn_in(p, init, U, 1000);
  const double ma = static_cast<double>(a.back().total()) / 200, mb = static_cast<double>(b.back().total()) / 200;
  CHECK(std::abs(ma - mb) < 0.1 * mb);
}

TEST_CASE("ancestral kernel") {
  const LbrwParams p = nn_params(2.0, 0.05);
  SUBCASE("single candidate") {
    PopState z(1, 20, -10);
    z.set(v1(1), 10);
    const WeightMap k = ancestral_kernel(p, z, v1(0));
    double at1 = 0, total = 0;
    for (const auto& [y, w] : k) {
      total += w;
      if (y == v1(1)) at1 = w;
    }
    CHECK(at1 == doctest::Approx(1.0));
    CHECK(total == doctest::Approx(1.0));
  }
  SUBCASE("symmetric pair") {
    PopState z(1, 20, -10);
    z.set(v1(-1), 8);
    z.set(v1(1), 8);
    for (const auto& [y, w] : ancestral_kernel(p, z, v1(0))) {
      if (y == v1(0)) {
        CHECK(w == 0.0);
      } else {
        CHECK(w == doctest::Approx(0.5));
      }
    }
  }
  SUBCASE("empty neighbourhood falls back to uniform") {
    PopState z(1, 20, -10);
    for (const auto& [y, w] : ancestral_kernel(p, z, v1(0))) CHECK(w == doctest::Approx(1.0 / 3));
  }
  SUBCASE("normalized on random configurations") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) {
      PopState z(1, 20, -10);
      for (std::size_t j = 0; j < z.size(); ++j) z[j] = static_cast<std::uint32_t>(rng() % 45);
      double total = 0;
      for (const auto& [y, w] : ancestral_kernel(p, z, v1(static_cast<std::int64_t>(rng() % 20) - 10))) total += w;
      CHECK(total == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("lineage kernel delegates to the ancestral kernel") {
  const LbrwParams p = nn_params();
  PopState init(1, 30, -15);
  for (std::size_t i = 0; i < init.size(); ++i) init[i] = 20;
  const PopTrajectory t = burn_in(p, init, UniformField(2, medium_stream(1)), 40, 10);
  for (std::int64_t k = 0; k < 10; ++k) {
    const Kernel a = kappa_lineage(p, t, k, v1(3));
    const WeightMap b = ancestral_kernel(p, t.at_time(t.back().time - k - 1), v1(3));
    CHECK(a == b);
  }
  CHECK_THROWS_AS(kappa_lineage(p, t, 10, v1(0)), WindowUnderflow);
}

TEST_CASE("reflected parents give mirrored offspring laws") {
  const LbrwParams p = nn_params();
  std::mt19937_64 rng(3);
  PopState z(1, 41, -20), zr(1, 41, -20);
  for (std::int64_t x = -20; x <= 20; ++x) z.set(v1(x), static_cast<std::uint32_t>(rng() % 30));
  for (std::int64_t x = -20; x <= 20; ++x) zr.set(v1(-x), z.at(v1(x)));
  std::vector<double> a, b;
  for (std::uint64_t s = 0; s < 4000; ++s) {
    a.push_back(step_population(p, z, UniformField(s, medium_stream(1))).at(v1(4)));
    b.push_back(step_population(p, zr, UniformField(s + 100000, medium_stream(1))).at(v1(-4)));
  }
  CHECK(ks_two_sample(a, b).p_value > 0.01);
}

TEST_CASE("sibling counts are conditionally uncorrelated") {
  const LbrwParams p = nn_params();
  PopState z(1, 21, -10);
  for (std::int64_t x = -10; x <= 10; ++x) z.set(v1(x), 18);
  std::vector<double> a, b;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const PopState next = step_population(p, z, UniformField(s, medium_stream(1)));
    a.push_back(next.at(v1(0)));
    b.push_back(next.at(v1(1)));
  }
  CHECK(std::abs(correlation(a, b)) < 0.02);
}

TEST_CASE("poisson inverse") {
  CHECK(poisson_inverse(0.0, 0.7) == 0);
  CHECK(poisson_inverse(1.0, 0.3) == 0);
  CHECK(poisson_inverse(1.0, 0.5) == 1);
  CHECK(poisson_inverse(1000.0, 0.5) >= 999);
  CHECK(poisson_inverse(1000.0, 0.5) <= 1001);
}
