#ifndef LINEAGELAB_TEST_SUPPORT_HPP
#define LINEAGELAB_TEST_SUPPORT_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "lattice.hpp"
#include "rng_field.hpp"

namespace llab::testing {

/// Medium backed by an explicit table; sites not in the table read `fallback`.
class TableMedium final : public Medium {
 public:
  explicit TableMedium(bool fallback = true) : fallback_(fallback) {}
  void set(const Site& s, bool v) { table_[s] = v; }
  bool open(const Site& s) const override {
    auto it = table_.find(s);
    return it == table_.end() ? fallback_ : it->second;
  }

 private:
  std::map<Site, bool> table_;
  bool fallback_;
};

/// Bernoulli(p) table on a d=1 box [x_lo, x_hi] x [n_lo, n_hi], `fallback` elsewhere.
inline TableMedium random_table_d1(std::mt19937_64& rng, double p, std::int64_t x_lo, std::int64_t x_hi,
                                   std::int64_t n_lo, std::int64_t n_hi, bool fallback) {
  TableMedium t(fallback);
  std::bernoulli_distribution b(p);
  for (std::int64_t n = n_lo; n <= n_hi; ++n)
    for (std::int64_t x = x_lo; x <= x_hi; ++x) t.set(Site{{x, 0, 0}, n}, b(rng));
  return t;
}

/// Longest backward open path from s by plain recursion over all predecessor choices, capped at `cap`.
inline int brute_ell(const Medium& omega, int d, const Site& s, int cap) {
  if (!omega.open(s)) return -1;
  if (cap == 0) return 0;
  int best = 0;
  for (const Vec& dz : sup_ball(d, 1)) {
    const int sub_len = brute_ell(omega, d, Site{add(s.x, dz), s.n - 1}, cap - 1);
    if (sub_len >= 0) best = std::max(best, 1 + sub_len);
  }
  return best;
}

}  // namespace llab::testing

#endif
