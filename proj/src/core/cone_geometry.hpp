#ifndef LINEAGELAB_CONE_GEOMETRY_HPP
#define LINEAGELAB_CONE_GEOMETRY_HPP

#include <cstdint>
#include <vector>

#include "lattice.hpp"
#include "rng_field.hpp"

namespace llab {

/// One or two cones sharing radii and slopes. Heights are relative to the base slice.
struct ConeSpec {
  int d = 2;
  std::vector<Vec> bases;
  double b_inn = 1.0, b_out = 2.0, s_inn = 0.5, s_out = 0.75;
  std::int64_t h = 0;  // negative means unbounded
  void validate() const;
};

bool in_cone(const Vec& base, double b, double s, std::int64_t h, int d, const Vec& z, std::int64_t n);
bool in_inner_cone(const ConeSpec& spec, const Vec& z, std::int64_t n);
bool in_outer_cone(const ConeSpec& spec, const Vec& z, std::int64_t n);
/// Conical shell around base j: b_inn + s_inn n <= |z - base| <= b_out + s_out n, 0 < n <= h.
bool in_shell(const ConeSpec& spec, std::size_t j, const Vec& z, std::int64_t n);
/// Union of the shells minus both inner cones.
bool in_double_shell(const ConeSpec& spec, const Vec& z, std::int64_t n);

/// d=1 four-wedge shell; merges into the outer wedges when the bases are within 2 b_out.
bool in_d1_wedge_shell(const ConeSpec& spec, std::int64_t z, std::int64_t n);
double d1_merge_time(const ConeSpec& spec);

/// Radius d(n) of the middle tube.
double middle_radius(const ConeSpec& spec, std::int64_t n);
bool in_middle_tube(const ConeSpec& spec, const Vec& z, std::int64_t n);
std::vector<Vec> middle_tube(const ConeSpec& spec, std::int64_t n);

/// Path of consecutive relative times with sup-norm steps of size at most 1.
bool crosses_shell(const ConeSpec& spec, const std::vector<Site>& path);

struct ScheduleParams {
  double s_max = 0.1, b_inn = 1.0, b_out = 2.0, s_inn = 0.5, s_out = 0.75;
};

/// t_1 = 1 and the recursion for t_{l+1}; entries until one exceeds `horizon`. Index 0 holds t_0 = 0.
std::vector<std::int64_t> schedule(const ScheduleParams& params, std::int64_t horizon);

/// Extremal-coupling test: the evolution with everything outside the outer cones
/// forced open and occupied is compared with the evolution started from ones on
/// the b_out balls and everything outside forced closed. Returns true iff the
/// two agree on every inner cone up to height h. Sites are (base + z, base_time + n).
bool good_shell(const Medium& omega, const ConeSpec& spec, std::int64_t base_time);

/// Survival to height h of the process restricted to the double shell, started from the base rings.
bool shell_survives(const Medium& omega, const ConeSpec& spec, std::int64_t base_time);

}  // namespace llab

#endif
