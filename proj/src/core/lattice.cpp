#include "lattice.hpp"

namespace llab {

namespace {

template <typename Keep>
void enumerate(int d, std::int64_t r, Keep keep, std::vector<Vec>& out) {
  Vec v{};
  for (int i = 0; i < d; ++i) v[i] = -r;
  while (true) {
    if (keep(v)) out.push_back(v);
    int i = d - 1;
    while (i >= 0 && v[i] == r) {
      v[i] = -r;
      --i;
    }
    if (i < 0) break;
    ++v[i];
  }
}

}  // namespace

std::vector<Vec> sup_ball(int d, std::int64_t r) {
  std::vector<Vec> out;
  enumerate(d, r, [](const Vec&) { return true; }, out);
  return out;
}

std::vector<Vec> euclid_ball(int d, double r) {
  std::vector<Vec> out;
  if (r < 0) return out;
  const auto R = static_cast<std::int64_t>(std::floor(r));
  const double r2 = r * r;
  enumerate(d, R, [&](const Vec& v) { return static_cast<double>(norm2_sq(v, d)) <= r2; }, out);
  return out;
}

std::vector<Vec> sup_ball_center_first(int d, std::int64_t r) {
  std::vector<Vec> out{Vec{}};
  for (const Vec& v : sup_ball(d, r))
    if (v != Vec{}) out.push_back(v);
  return out;
}

}  // namespace llab
