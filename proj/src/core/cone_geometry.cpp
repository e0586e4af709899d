#include "cone_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace llab {

void ConeSpec::validate() const {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("cone dimension must be 1, 2 or 3");
  if (bases.empty() || bases.size() > 2) throw std::invalid_argument("a cone spec needs one or two base points");
  if (!(b_inn < b_out)) throw std::invalid_argument("cone radii must satisfy b_inn < b_out");
  if (!(s_inn < s_out)) throw std::invalid_argument("cone slopes must satisfy s_inn < s_out");
}

namespace {

bool within(const Vec& base, double r, int d, const Vec& z) {
  if (r < 0) return false;
  return static_cast<double>(norm2_sq(sub(z, base), d)) <= r * r;
}

bool strictly_within(const Vec& base, double r, int d, const Vec& z) {
  if (r <= 0) return false;
  return static_cast<double>(norm2_sq(sub(z, base), d)) < r * r;
}

bool height_ok(std::int64_t h, std::int64_t n) { return n >= 0 && (h < 0 || n <= h); }

/// Dense box covering all bases with a margin; last coordinate varies fastest.
struct Box {
  int d;
  Vec lo{}, ext{};
  std::size_t size = 1;

  Box(const ConeSpec& spec, std::int64_t margin) : d(spec.d) {
    for (int i = 0; i < kMaxDim; ++i) {
      if (i < d) {
        std::int64_t a = spec.bases[0][i], b = spec.bases[0][i];
        for (const Vec& v : spec.bases) {
          a = std::min(a, v[i]);
          b = std::max(b, v[i]);
        }
        lo[i] = a - margin;
        ext[i] = b - a + 2 * margin + 1;
      } else {
        lo[i] = 0;
        ext[i] = 1;
      }
      size *= static_cast<std::size_t>(ext[i]);
    }
  }

  Vec coords(std::size_t idx) const {
    Vec x{};
    for (int i = kMaxDim - 1; i >= 0; --i) {
      const auto e = static_cast<std::size_t>(ext[i]);
      x[i] = lo[i] + static_cast<std::int64_t>(idx % e);
      idx /= e;
    }
    return x;
  }

  /// Sup-norm radius-1 OR filter; neighbours outside the box read as `outside`.
  void dilate(const std::vector<std::uint8_t>& in, std::vector<std::uint8_t>& out, std::uint8_t outside) const {
    out = in;
    std::vector<std::uint8_t> src;
    std::size_t stride = 1;
    for (int i = kMaxDim - 1; i >= 0; --i) {
      if (ext[i] > 1) {
        src = out;
        const auto e = static_cast<std::size_t>(ext[i]);
        for (std::size_t idx = 0; idx < size; ++idx) {
          const std::size_t c = (idx / stride) % e;
          std::uint8_t v = src[idx];
          v |= c > 0 ? src[idx - stride] : outside;
          v |= c + 1 < e ? src[idx + stride] : outside;
          out[idx] = v;
        }
      }
      stride *= static_cast<std::size_t>(ext[i]);
    }
  }
};

}  // namespace

bool in_cone(const Vec& base, double b, double s, std::int64_t h, int d, const Vec& z, std::int64_t n) {
  return height_ok(h, n) && within(base, b + s * static_cast<double>(n), d, z);
}

bool in_inner_cone(const ConeSpec& spec, const Vec& z, std::int64_t n) {
  for (const Vec& base : spec.bases)
    if (in_cone(base, spec.b_inn, spec.s_inn, spec.h, spec.d, z, n)) return true;
  return false;
}

bool in_outer_cone(const ConeSpec& spec, const Vec& z, std::int64_t n) {
  for (const Vec& base : spec.bases)
    if (in_cone(base, spec.b_out, spec.s_out, spec.h, spec.d, z, n)) return true;
  return false;
}

bool in_shell(const ConeSpec& spec, std::size_t j, const Vec& z, std::int64_t n) {
  if (n <= 0 || (spec.h >= 0 && n > spec.h)) return false;
  const double dn = static_cast<double>(n);
  const double r_in = spec.b_inn + spec.s_inn * dn;
  const double r_out = spec.b_out + spec.s_out * dn;
  const double dist2 = static_cast<double>(norm2_sq(sub(z, spec.bases.at(j)), spec.d));
  return dist2 >= (r_in > 0 ? r_in * r_in : 0.0) && r_out >= 0 && dist2 <= r_out * r_out;
}

bool in_double_shell(const ConeSpec& spec, const Vec& z, std::int64_t n) {
  bool any = false;
  for (std::size_t j = 0; j < spec.bases.size(); ++j) any = any || in_shell(spec, j, z, n);
  return any && !in_inner_cone(spec, z, n);
}

double d1_merge_time(const ConeSpec& spec) {
  const std::int64_t a = std::min(spec.bases.front()[0], spec.bases.back()[0]);
  const std::int64_t b = std::max(spec.bases.front()[0], spec.bases.back()[0]);
  return (static_cast<double>(b - a) - spec.b_out - spec.b_inn) / (spec.s_out + spec.s_inn);
}

bool in_d1_wedge_shell(const ConeSpec& spec, std::int64_t z, std::int64_t n) {
  if (spec.d != 1) throw std::invalid_argument("the wedge shell is a d=1 construction");
  if (n <= 0 || (spec.h >= 0 && n > spec.h)) return false;
  const double a = static_cast<double>(std::min(spec.bases.front()[0], spec.bases.back()[0]));
  const double b = static_cast<double>(std::max(spec.bases.front()[0], spec.bases.back()[0]));
  const double dn = static_cast<double>(n), y = static_cast<double>(z);
  const double r_in = spec.b_inn + spec.s_inn * dn, r_out = spec.b_out + spec.s_out * dn;
  const auto left = [&](double c) { return c - r_out <= y && y <= c - r_in; };
  const auto right = [&](double c) { return c + r_in <= y && y <= c + r_out; };
  if (left(a) || right(b)) return true;
  if (b - a <= 2 * spec.b_out) return false;
  const double t_merge = std::ceil(d1_merge_time(spec));
  return dn <= t_merge && (right(a) || left(b));
}

double middle_radius(const ConeSpec& spec, std::int64_t n) {
  return 0.5 * (static_cast<double>(n) * (spec.s_out + spec.s_inn) + spec.b_out + spec.b_inn);
}

bool in_middle_tube(const ConeSpec& spec, const Vec& z, std::int64_t n) {
  if (spec.d < 2) throw std::invalid_argument("the middle tube is defined for d >= 2 only");
  const double r = middle_radius(spec, n);
  const double width = 2.0 * spec.d;
  bool in_annulus = false;
  for (const Vec& base : spec.bases) {
    const double dist2 = static_cast<double>(norm2_sq(sub(z, base), spec.d));
    if (dist2 < r * r) return false;
    if (dist2 <= (r + width) * (r + width)) in_annulus = true;
  }
  return in_annulus;
}

std::vector<Vec> middle_tube(const ConeSpec& spec, std::int64_t n) {
  if (spec.d < 2) throw std::invalid_argument("the middle tube is defined for d >= 2 only");
  const auto R = static_cast<std::int64_t>(std::floor(middle_radius(spec, n) + 2.0 * spec.d));
  std::vector<Vec> out;
  for (const Vec& base : spec.bases)
    for (const Vec& v : sup_ball(spec.d, R)) {
      const Vec z = add(base, v);
      if (in_middle_tube(spec, z, n)) out.push_back(z);
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool crosses_shell(const ConeSpec& spec, const std::vector<Site>& path) {
  if (path.size() < 2) return false;
  for (std::size_t i = 1; i < path.size(); ++i)
    if (path[i].n != path[i - 1].n + 1 || sup_norm(sub(path[i].x, path[i - 1].x), spec.d) > 1)
      throw std::invalid_argument("crosses_shell expects a nearest-neighbour path");
  const Site& start = path.front();
  const Site& end = path.back();
  for (const Vec& base : spec.bases)
    if (in_cone(base, spec.b_out, spec.s_out, spec.h, spec.d, start.x, start.n)) return false;
  bool inside = false;
  for (const Vec& base : spec.bases)
    inside = inside || (height_ok(spec.h, end.n) &&
                        strictly_within(base, spec.b_inn + spec.s_inn * static_cast<double>(end.n), spec.d, end.x));
  if (!inside) return false;
  for (std::size_t i = 1; i + 1 < path.size(); ++i)
    if (!in_double_shell(spec, path[i].x, path[i].n)) return false;
  return true;
}

std::vector<std::int64_t> schedule(const ScheduleParams& p, std::int64_t horizon) {
  if (!(p.s_inn > p.s_max)) throw std::invalid_argument("schedule requires s_inn > s_max");
  std::vector<std::int64_t> t{0, 1};
  while (t.back() <= horizon) {
    const auto cur = static_cast<double>(t.back());
    const double v = (cur * p.s_max + p.b_out + cur * p.s_out - p.b_inn) / (p.s_inn - p.s_max);
    const auto next = static_cast<std::int64_t>(std::ceil(v - 1e-9)) + 1;
    const auto nx = static_cast<double>(next);
    if (!(nx * p.s_inn + p.b_inn - nx * p.s_max > cur * p.s_max + p.b_out + cur * p.s_out))
      throw std::logic_error("schedule violates the cone nesting condition");
    if (next <= t.back()) throw std::logic_error("schedule is not increasing");
    t.push_back(next);
  }
  return t;
}

bool good_shell(const Medium& omega, const ConeSpec& spec, std::int64_t base_time) {
  spec.validate();
  if (spec.h < 0) throw std::invalid_argument("good_shell needs a finite height");
  const int d = spec.d;
  const auto margin = static_cast<std::int64_t>(std::ceil(spec.b_out + spec.s_out * static_cast<double>(spec.h))) + 2;
  const Box box(spec, margin);
  // Outside the outer cones the upper evolution is 1 and the lower one 0; the
  // arrays start in that state and only the cone cross-sections are updated.
  std::vector<std::uint8_t> hi(box.size, 1), lo(box.size, 0);
  std::vector<std::uint8_t> nhi, nlo;
  std::vector<Vec> nbrs = sup_ball(d, 1);
  std::vector<std::ptrdiff_t> offs;
  for (const Vec& z : nbrs) {
    std::ptrdiff_t o = 0, stride = 1;
    for (int i = kMaxDim - 1; i >= 0; --i) {
      o += static_cast<std::ptrdiff_t>(z[i]) * stride;
      stride *= static_cast<std::ptrdiff_t>(box.ext[i]);
    }
    offs.push_back(o);
  }
  const auto flat = [&](const Vec& x) {
    std::size_t idx = 0;
    for (int i = 0; i < kMaxDim; ++i)
      idx = idx * static_cast<std::size_t>(box.ext[i]) + static_cast<std::size_t>(x[i] - box.lo[i]);
    return idx;
  };
  const auto near_bases = [&](const Vec& x, double r) {
    for (const Vec& base : spec.bases)
      if (within(base, r, d, x)) return true;
    return false;
  };

  Vec blo{}, bhi{};
  const auto set_bbox = [&](double r) {
    const auto R = static_cast<std::int64_t>(std::ceil(std::max(r, 0.0)));
    for (int i = 0; i < kMaxDim; ++i) {
      blo[i] = bhi[i] = 0;
      if (i >= d) continue;
      blo[i] = bhi[i] = spec.bases[0][i];
      for (const Vec& v : spec.bases) {
        blo[i] = std::min(blo[i], v[i]);
        bhi[i] = std::max(bhi[i], v[i]);
      }
      blo[i] -= R;
      bhi[i] += R;
    }
  };
  const auto for_bbox = [&](auto&& fn) {
    Vec x = blo;
    while (true) {
      fn(x);
      int i = d - 1;
      while (i >= 0 && x[i] == bhi[i]) {
        x[i] = blo[i];
        --i;
      }
      if (i < 0) break;
      ++x[i];
    }
  };

  set_bbox(spec.b_out);
  for_bbox([&](const Vec& x) {
    if (near_bases(x, spec.b_out)) lo[flat(x)] = 1;
  });

  for (std::int64_t n = 1; n <= spec.h; ++n) {
    const double dn = static_cast<double>(n);
    const double r_out = spec.b_out + spec.s_out * dn, r_in = spec.b_inn + spec.s_inn * dn;
    set_bbox(r_out);
    nhi = hi;
    nlo = lo;
    bool agree = true;
    for_bbox([&](const Vec& x) {
      if (!agree) return;
      const std::size_t idx = flat(x);
      if (!near_bases(x, r_out)) return;
      std::uint8_t dh = 0, dl = 0;
      for (std::ptrdiff_t o : offs) {
        dh |= hi[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) + o)];
        dl |= lo[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) + o)];
      }
      std::uint8_t vh = 0, vl = 0;
      if (dh) {
        const std::uint8_t open = omega.open(Site{x, base_time + n}) ? 1 : 0;
        vh = open;
        vl = open & dl;
      }
      nhi[idx] = vh;
      nlo[idx] = vl;
      if (vh != vl && near_bases(x, r_in)) agree = false;
    });
    if (!agree) return false;
    hi.swap(nhi);
    lo.swap(nlo);
  }
  return true;
}

bool shell_survives(const Medium& omega, const ConeSpec& spec, std::int64_t base_time) {
  spec.validate();
  if (spec.h < 0) throw std::invalid_argument("shell_survives needs a finite height");
  const int d = spec.d;
  const auto margin = static_cast<std::int64_t>(std::ceil(spec.b_out + spec.s_out * static_cast<double>(spec.h))) + 1;
  const Box box(spec, margin);
  std::vector<std::uint8_t> act(box.size, 0), dil;
  bool any = false;
  for (std::size_t i = 0; i < box.size; ++i) {
    const Vec z = box.coords(i);
    for (const Vec& base : spec.bases) {
      const double dist2 = static_cast<double>(norm2_sq(sub(z, base), d));
      if (dist2 >= spec.b_inn * spec.b_inn && dist2 <= spec.b_out * spec.b_out) act[i] = 1;
    }
    any = any || act[i];
  }
  for (std::int64_t n = 1; n <= spec.h && any; ++n) {
    box.dilate(act, dil, 0);
    any = false;
    for (std::size_t i = 0; i < box.size; ++i) {
      act[i] = 0;
      if (!dil[i]) continue;
      const Vec z = box.coords(i);
      if (in_double_shell(spec, z, n) && omega.open(Site{z, base_time + n})) act[i] = 1;
      any = any || act[i];
    }
  }
  return any;
}

}  // namespace llab
