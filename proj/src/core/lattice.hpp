#ifndef LINEAGELAB_LATTICE_HPP
#define LINEAGELAB_LATTICE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace llab {

inline constexpr int kMaxDim = 3;

/// Lattice vector; coordinates beyond the experiment dimension stay zero.
using Vec = std::array<std::int64_t, kMaxDim>;

/// Space-time point. `n` is environment time; walk time k is environment time -k.
struct Site {
  Vec x{};
  std::int64_t n = 0;

  friend bool operator==(const Site&, const Site&) = default;
  friend auto operator<=>(const Site&, const Site&) = default;

  template <typename H>
  friend H AbslHashValue(H h, const Site& s) {
    return H::combine(std::move(h), s.x[0], s.x[1], s.x[2], s.n);
  }
};

inline Vec add(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec sub(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec neg(const Vec& a) { return {-a[0], -a[1], -a[2]}; }

inline std::int64_t sup_norm(const Vec& v, int d) {
  std::int64_t m = 0;
  for (int i = 0; i < d; ++i) m = std::max(m, v[i] < 0 ? -v[i] : v[i]);
  return m;
}

inline std::int64_t norm2_sq(const Vec& v, int d) {
  std::int64_t s = 0;
  for (int i = 0; i < d; ++i) s += v[i] * v[i];
  return s;
}

inline double euclid(const Vec& v, int d) { return std::sqrt(static_cast<double>(norm2_sq(v, d))); }

/// Largest Euclidean distance from `c` to a point of the sup-norm ball of radius r around y.
inline double far_corner(const Vec& y, std::int64_t r, const Vec& c, int d) {
  double s = 0;
  for (int i = 0; i < d; ++i) {
    const double a = static_cast<double>(std::abs(y[i] - c[i]) + r);
    s += a * a;
  }
  return std::sqrt(s);
}

/// Sup-norm ball of radius r around the origin, lexicographic order.
std::vector<Vec> sup_ball(int d, std::int64_t r);

/// Closed Euclidean ball of radius r around the origin, lexicographic order.
std::vector<Vec> euclid_ball(int d, double r);

/// Sup-norm ball with the origin first, then the remaining points lexicographically.
std::vector<Vec> sup_ball_center_first(int d, std::int64_t r);

}  // namespace llab

#endif
