#include <doctest.h>

#include <functional>
#include <random>

#include "contact_env.hpp"
#include "support.hpp"

using namespace llab;
using llab::testing::TableMedium;

namespace {

Site s1(std::int64_t x, std::int64_t n) { return Site{{x, 0, 0}, n}; }

/// Enumerates all 3^(steps) d=1 paths from `from`.
bool brute_path(const Medium& omega, const Site& from, const Site& to) {
  if (!omega.open(from)) return false;
  if (from.n == to.n) return from.x == to.x;
  for (std::int64_t dx = -1; dx <= 1; ++dx)
    if (brute_path(omega, s1(from.x[0] + dx, from.n + 1), to)) return true;
  return false;
}

}  // namespace

TEST_CASE("open paths") {
  const ConstantMedium open(true), closed(false);
  CHECK(open_path_exists(open, 1, s1(0, 0), s1(0, 0)));
  CHECK_FALSE(open_path_exists(closed, 1, s1(0, 0), s1(0, 0)));
  CHECK_FALSE(open_path_exists(open, 1, s1(0, 0), s1(4, 3)));
  CHECK_FALSE(open_path_exists(open, 2, Site{{0, 0, 0}, 0}, Site{{2, 3, 0}, 2}));
  CHECK_THROWS(open_path_exists(open, 1, s1(0, 5), s1(0, 4)));
}

TEST_CASE("open paths agree with enumeration on random 5x6 windows") {
  std::mt19937_64 rng(17);
  int agree = 0, positives = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const TableMedium t = llab::testing::random_table_d1(rng, 0.65, -8, 12, 0, 6, false);
    const std::int64_t a = static_cast<std::int64_t>(rng() % 5), b = static_cast<std::int64_t>(rng() % 5);
    const bool fast = open_path_exists(t, 1, s1(a, 0), s1(b, 6));
    const bool slow = brute_path(t, s1(a, 0), s1(b, 6));
    agree += fast == slow;
    positives += slow;
  }
  CHECK(agree == 100);
  CHECK(positives > 0);
}

TEST_CASE("finite-start eta") {
  const ConstantMedium open(true);
  CHECK(eta_finite(open, 1, {Vec{0, 0, 0}}, 3, s1(0, 3)));
  CHECK_FALSE(eta_finite(open, 1, {}, 0, s1(0, 3)));
  TableMedium t(true);
  t.set(s1(0, 5), false);
  CHECK_FALSE(eta_finite(t, 1, {Vec{0, 0, 0}}, 0, s1(0, 5)));

  SUBCASE("matches the path definition and is monotone in the initial set") {
    std::mt19937_64 rng(5);
    int agree = 0, monotone = 0;
    for (int inst = 0; inst < 50; ++inst) {
      const TableMedium w = llab::testing::random_table_d1(rng, 0.6, -10, 10, 0, 5, false);
      std::vector<Vec> A, B;
      for (std::int64_t x = -4; x <= 4; ++x)
        if (rng() % 2) A.push_back(Vec{x, 0, 0});
      B = A;
      for (std::int64_t x = -4; x <= 4; ++x)
        if (rng() % 3 == 0) B.push_back(Vec{x, 0, 0});
      const Site s = s1(static_cast<std::int64_t>(rng() % 5) - 2, 5);
      bool by_paths = false;
      for (const Vec& a : A) by_paths = by_paths || open_path_exists(w, 1, Site{a, 0}, s);
      agree += eta_finite(w, 1, A, 0, s) == by_paths;
      monotone += !eta_finite(w, 1, A, 0, s) || eta_finite(w, 1, B, 0, s);
    }
    CHECK(agree == 50);
    CHECK(monotone == 50);
  }
}

TEST_CASE("stationary eta and ell") {
  const ConstantMedium open(true);
  EtaOracle all(open, 2, 64);
  CHECK(eta_stationary(all, Site{{3, -1, 0}, 10}));
  CHECK(ell(all, Site{{0, 0, 0}, 0}) == kEllInf);
  CHECK_FALSE(determining_triangle(all, Site{{0, 0, 0}, 0}).has_value());

  TableMedium t(true);
  t.set(s1(0, 0), false);
  EtaOracle o(t, 1, 64);
  CHECK_FALSE(eta_stationary(o, s1(0, 0)));
  CHECK(ell(o, s1(0, 0)) == -1);
}

TEST_CASE("one backward step then blocked gives ell 1") {
  // (0,0) open, only (1,-1) open below it, everything at time -2 near it closed
  TableMedium t(true);
  t.set(s1(-1, -1), false);
  t.set(s1(0, -1), false);
  for (std::int64_t x = -3; x <= 3; ++x) t.set(s1(x, -2), false);
  EtaOracle o(t, 1, 64);
  CHECK(ell(o, s1(0, 0)) == 1);
  // enumeration over the 5x4 window below the site
  CHECK(llab::testing::brute_ell(t, 1, s1(0, 0), 3) == 1);
  const auto tri = determining_triangle(o, s1(0, 0));
  REQUIRE(tri.has_value());
  CHECK(tri->height == 2);
}

TEST_CASE("ell agrees with enumeration and with finite-start eta") {
  std::mt19937_64 rng(23);
  int agree = 0, cross = 0;
  for (int inst = 0; inst < 60; ++inst) {
    // closed floor at time -7 keeps every ell below the window
    TableMedium t = llab::testing::random_table_d1(rng, 0.7, -12, 12, -6, 0, true);
    for (std::int64_t x = -12; x <= 12; ++x) t.set(s1(x, -7), false);
    EtaOracle o(t, 1, 32);
    const Site s = s1(0, 0);
    const int e = ell(o, s);
    agree += e == llab::testing::brute_ell(t, 1, s, 10);
    // ell >= k iff the full slice at -k reaches s
    bool ok = true;
    for (int k = 0; k <= 7; ++k) {
      std::vector<Vec> A;
      for (std::int64_t x = -k; x <= k; ++x) A.push_back(Vec{x, 0, 0});
      ok = ok && ((e >= k) == eta_finite(t, 1, A, -k, s));
    }
    cross += ok;
  }
  CHECK(agree == 60);
  CHECK(cross == 60);
}

TEST_CASE("triangle member counts") {
  Triangle a{s1(0, 0), 1};
  CHECK(a.member_count(1) == 4);
  CHECK(a.members(1).size() == 4);
  Triangle b{Site{{0, 0, 0}, 0}, 2};
  CHECK(b.member_count(2) == 35);
  CHECK(b.members(2).size() == 35);
  CHECK(b.contains(Site{{2, -2, 0}, -2}, 2));
  CHECK_FALSE(b.contains(Site{{2, 0, 0}, -1}, 2));
  CHECK_FALSE(b.contains(Site{{0, 0, 0}, -3}, 2));
  CHECK_FALSE(b.contains(Site{{0, 0, 0}, 1}, 2));
}

TEST_CASE("eta implies omega, monotone in the window and determined by its triangle") {
  const OmegaField omega(31, medium_stream(1), 0.62);
  EtaOracle a(omega, 1, 10), b(omega, 1, 20);
  int zeros = 0;
  for (std::int64_t x = -60; x <= 60; ++x)
    for (std::int64_t n = 0; n < 5; ++n) {
      const Site s = s1(x, n);
      const bool ea = a.eta(s), eb = b.eta(s);
      CHECK((!eb || omega.open(s)));
      CHECK((!eb || ea));
      if (ea) continue;
      ++zeros;
      const auto tri = determining_triangle(a, s);
      REQUIRE(tri.has_value());
      // omega kept on the triangle, everything else forced open
      const FunctionMedium restricted([&](const Site& q) { return tri->contains(q, 1) ? omega.open(q) : true; });
      EtaOracle r(restricted, 1, 10);
      CHECK_FALSE(r.eta(s));
      CHECK(r.ell(s) == a.ell(s));
    }
  CHECK(zeros > 50);
}

TEST_CASE("window disagreement decays") {
  const OmegaField omega(2, medium_stream(1), 0.7);
  std::vector<Site> sites;
  for (std::int64_t i = 0; i < 20000; ++i) sites.push_back(s1(i * 7, (i % 13) * 200));
  const double d4 = window_disagreement(omega, 1, 4, sites);
  const double d8 = window_disagreement(omega, 1, 8, sites);
  CHECK(d4 > 0);
  CHECK(d8 < d4);
}

TEST_CASE("slab evaluation matches the lazy oracle") {
  const OmegaField omega(12, medium_stream(1), 0.7);
  SlabEta slab(omega, 1, 16, Vec{-20, 0, 0}, Vec{20, 0, 0}, -30, 0);
  EtaOracle lazy(omega, 1, 16);
  for (std::int64_t x = -25; x <= 25; ++x)
    for (std::int64_t n = -35; n <= 2; ++n) CHECK(slab.ell(s1(x, n)) == lazy.ell(s1(x, n)));
}
