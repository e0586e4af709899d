#include <doctest.h>

#include <cmath>

#include "coupling_lab.hpp"
#include "parallel.hpp"

using namespace llab;

namespace {

CouplingSetup setup_d2(std::uint64_t seed) {
  CouplingSetup s;
  s.seed = seed;
  s.p = 0.98;
  s.m_relax = 64;
  s.spec.d = 2;
  s.regen = RegenParams{1.95, 1.97, 0.9, 0.92, 0.12};
  return s;
}

}  // namespace

TEST_CASE("identical media never uncouple") {
  CouplingSetup s = setup_d2(3);
  s.same_media = true;
  const auto curve = failure_curve(s, {2, 4, 8}, 60);
  for (const FailurePoint& f : curve) CHECK(f.failures == 0);
  const auto chain = run_coupled_chain(s, Vec{}, Vec{5, 0, 0}, 20);
  CHECK(uncoupled_count(chain, chain.size()) == 0);
}

TEST_CASE("coincident starts uncouple with positive frequency") {
  int fails = 0;
  for (std::uint64_t r = 0; r < 200; ++r) fails += coupled_step(setup_d2(replica_seed(11, r)), 0, Vec{}, Vec{}).uncoupled;
  CHECK(fails > 0);
}

TEST_CASE("uncoupled exactly when the increments differ") {
  const CouplingSetup s = setup_d2(5);
  const auto chain = run_coupled_chain(s, Vec{}, Vec{3, 1, 0}, 30);
  REQUIRE(chain.size() == 30);
  Vec x{}, xp{3, 1, 0};
  for (const CouplingRecord& r : chain) {
    CHECK(r.joint.found);
    CHECK(r.uncoupled == !(r.joint == r.ind));
    CHECK(r.ind == ind_step(s, r.step, x, xp));
    x = add(x, r.joint.dX);
    xp = add(xp, r.joint.dXp);
  }
}

TEST_CASE("uncoupled counts") {
  std::vector<CouplingRecord> recs(5);
  recs[1].uncoupled = recs[3].uncoupled = true;
  CHECK(uncoupled_count(recs, 3) == 1);
  CHECK(uncoupled_count(recs, 5) == 2);
  CHECK_THROWS(uncoupled_count(recs, 6));
}

TEST_CASE("failure slope treats empty counts as half a failure") {
  std::vector<FailurePoint> c{{2, 100, 8}, {4, 100, 2}, {8, 100, 0}};
  const double slope = failure_slope(c);
  const double x[] = {std::log(2.0), std::log(4.0), std::log(8.0)};
  const double y[] = {std::log(0.08), std::log(0.02), std::log(0.005)};
  const double mx = (x[0] + x[1] + x[2]) / 3, my = (y[0] + y[1] + y[2]) / 3;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 3; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  CHECK(slope == doctest::Approx(sxy / sxx));
  CHECK_THROWS(failure_curve(setup_d2(1), {0}, 2));
}

TEST_CASE("failure frequency is translation invariant") {
  const int N = 300;
  int a = 0, b = 0;
  for (int r = 0; r < N; ++r) {
    a += coupled_step(setup_d2(replica_seed(21, r)), 0, Vec{}, Vec{2, 0, 0}).uncoupled;
    b += coupled_step(setup_d2(replica_seed(22, r)), 0, Vec{37, -12, 0}, Vec{39, -12, 0}).uncoupled;
  }
  const double pa = double(a) / N, pb = double(b) / N, pool = double(a + b) / (2 * N);
  const double se = std::sqrt(pool * (1 - pool) * 2.0 / N);
  REQUIRE(se > 0);
  CHECK(std::abs(pa - pb) / se < 3.0);
}
