#include <doctest.h>

#include <random>

#include "coarse_grain.hpp"

using namespace llab;

namespace {

CoarseSetup setup_d1(std::uint64_t seed) {
  CoarseSetup s;
  s.lbrw.d = 1;
  s.lbrw.m = 2.0;
  s.lbrw.lambda0 = 0.05;
  s.lbrw.p_mig = LbrwParams::nearest_neighbour(1);
  s.block = BlockSpec{5, 20, 1};
  s.seed = seed;
  return s;
}

Vec v1(std::int64_t x) { return Vec{x, 0, 0}; }

}  // namespace

TEST_CASE("coarse-graining function") {
  CHECK(cg_pi(3, 5) == 1);
  CHECK(cg_rho(3, 5) == -2);
  CHECK(cg_pi(-3, 5) == -1);
  CHECK(cg_rho(-3, 5) == 2);
  for (std::int64_t L : {1, 2, 5, 8}) {
    int bad = 0;
    for (std::int64_t x = -10000; x <= 10000; ++x) {
      bad += cg_pi(x, L) * L + cg_rho(x, L) != x;
      bad += 2 * cg_rho(x, L) > L || 2 * cg_rho(x, L) < -L;
    }
    CHECK(bad == 0);
  }
  const Vec x{7, -13, 0};
  CHECK(add(Vec{cg_pi(x, 5, 2)[0] * 5, cg_pi(x, 5, 2)[1] * 5, 0}, cg_rho(x, 5, 2)) == x);
}

TEST_CASE("interaction reach of a block") {
  CHECK(k_eta(BlockSpec{4, 10, 2}) == 8);
  CHECK(k_eta(BlockSpec{4, 10, 0}) == 0);
  CHECK(k_eta(BlockSpec{6, 6, 3}) == 6);
}

TEST_CASE("reference configuration is good") {
  const CoarseSetup s = setup_d1(1);
  const PopState ref = reference_bottom(s, v1(3), 2);
  CHECK(eta_good(ref, Vec{}, 2 * s.block.L_s, s.band));
  CHECK(eta_good(ref, Vec{}, 3 * s.block.L_s, s.band));
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) CHECK(eta_good(random_good_bottom(s, v1(0), 0, rng), Vec{}, 2 * s.block.L_s, s.band));
}

TEST_CASE("most blocks are good and good blocks contract") {
  const CoarseSetup s = setup_d1(8);
  const Noise noise = noise_from(UniformField(8, medium_stream(1)));
  int good = 0, total = 0;
  double pass = 0;
  for (std::int64_t cx = 0; cx < 20; ++cx)
    for (std::int64_t cn = 0; cn < 3; ++cn) {
      ++total;
      if (!block_good(s, noise, v1(cx), cn).good_U) continue;
      ++good;
      pass += verify_contraction(s, noise, v1(cx), cn, 10, 99);
    }
  CHECK(double(good) / total >= 0.8);
  REQUIRE(good > 0);
  CHECK(pass / good >= 0.99);
}

TEST_CASE("noise forcing extinction gives a bad block") {
  const CoarseSetup s = setup_d1(2);
  const Noise zero = [](const Site&) { return 0.0; };
  const BlockFlags f = block_good(s, zero, v1(0), 0);
  CHECK_FALSE(f.good_U);
  CHECK_FALSE(f.reference_top_good);
  CHECK(verify_contraction(s, zero, v1(0), 0, 10, 1) < 1.0);
}

TEST_CASE("identical bottoms give identical tops") {
  const CoarseSetup s = setup_d1(3);
  const Noise noise = noise_from(UniformField(3, medium_stream(1)));
  std::mt19937_64 rng(6);
  for (int i = 0; i < 5; ++i) {
    const PopState b = random_good_bottom(s, v1(i), 1, rng);
    CHECK(block_flow(s, noise, v1(i), 1, b) == block_flow(s, noise, v1(i), 1, b));
  }
}

TEST_CASE("coarse contact process is dominated by the good field") {
  const CoarseSetup s = setup_d1(5);
  const CoarseField F = build_coarse_field(s, noise_from(UniformField(5, medium_stream(1))), v1(0), 8, 0, 4);
  REQUIRE(F.U.size() == 32);
  for (std::size_t i = 0; i < F.U.size(); ++i) CHECK(F.xi[i] <= F.U[i]);
  for (std::int64_t x = 0; x < 8; ++x) CHECK(F.xi[F.index(v1(x), 0)] == F.U[F.index(v1(x), 0)]);
  for (std::int64_t n = 1; n < 4; ++n)
    for (std::int64_t x = 0; x < 8; ++x) {
      bool below = false;
      for (std::int64_t z = -1; z <= 1; ++z)
        if (F.inside(v1(x + z), n - 1)) below = below || F.xi[F.index(v1(x + z), n - 1)];
      CHECK(F.xi[F.index(v1(x), n)] == (F.U[F.index(v1(x), n)] && below));
    }
}

TEST_CASE("determining cluster") {
  SUBCASE("open seed is a singleton") {
    const DCluster c = determining_cluster([](const Vec&, std::int64_t) { return true; }, v1(2), 5, 1, 1, 10);
    CHECK(c.members.size() == 1);
    CHECK(c.height == 0);
    CHECK_FALSE(c.partial);
  }
  SUBCASE("one growth round") {
    const XiOracle xi = [](const Vec&, std::int64_t n) { return n != 5; };
    const DCluster c = determining_cluster(xi, v1(2), 5, 1, 1, 10);
    CHECK(c.members.size() == 4);
    CHECK(c.height == 1);
    CHECK(c.members.count({4, v1(1)}) == 1);
    CHECK(c.members.count({4, v1(3)}) == 1);
  }
  SUBCASE("height cap is flagged") {
    const DCluster c = determining_cluster([](const Vec&, std::int64_t) { return false; }, v1(0), 0, 1, 1, 3);
    CHECK(c.partial);
    CHECK(c.height == 3);
  }
}

TEST_CASE("coarse walk") {
  const BlockSpec spec{5, 20, 1};
  const CgPath still = cg_walk(std::vector<Vec>(101, Vec{}), spec, 1);
  CHECK(still.coarse.size() == 6);
  for (std::size_t i = 0; i < still.coarse.size(); ++i) {
    CHECK(still.coarse[i] == Vec{});
    CHECK(still.offset[i] == Vec{});
  }
  std::mt19937_64 rng(7);
  std::vector<Vec> path{Vec{}};
  for (int k = 0; k < 200000; ++k)
    path.push_back(add(path.back(), Vec{static_cast<std::int64_t>(rng() % 3) - 1, static_cast<std::int64_t>(rng() % 3) - 1, 0}));
  const CgPath c = cg_walk(path, spec, 2);
  REQUIRE(c.coarse.size() == 10001);
  int bad = 0;
  for (std::size_t i = 0; i < c.coarse.size(); ++i) {
    const Vec& x = path[i * 20];
    for (int j = 0; j < 2; ++j) {
      bad += c.coarse[i][j] * 5 + c.offset[i][j] != x[j];
      bad += 2 * c.offset[i][j] > 5 || 2 * c.offset[i][j] < -5;
    }
  }
  CHECK(bad == 0);
}
