#include "rng_field.hpp"

#include <cmath>
#include <stdexcept>

namespace llab {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

std::uint64_t pack_space(const Vec& x) {
  std::uint64_t a = 0;
  for (int i = 0; i < kMaxDim; ++i) {
    if (x[i] <= -kCoordLimit || x[i] >= kCoordLimit) throw std::out_of_range("lattice coordinate outside supported box");
    a |= static_cast<std::uint64_t>(x[i] + kCoordLimit) << (21 * i);
  }
  return a;
}

std::uint64_t pack_time(std::int64_t n, std::uint32_t draw) {
  if (n < -kTimeLimit || n >= kTimeLimit) throw std::out_of_range("time coordinate outside supported range");
  return static_cast<std::uint64_t>(n + kTimeLimit) | (static_cast<std::uint64_t>(draw) << 32);
}

}  // namespace

std::uint64_t hash_site(std::uint64_t seed, std::uint32_t stream, const Site& s, std::uint32_t draw) {
  const std::uint64_t key = mix64(seed ^ mix64(0x6a09e667f3bcc909ULL + stream));
  const std::uint64_t h = mix64(key ^ pack_space(s.x));
  return mix64(h ^ pack_time(s.n, draw) ^ (key >> 7));
}

OmegaField::OmegaField(std::uint64_t seed, std::uint32_t stream, double p) : seed_(seed), stream_(stream), p_(p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
  if (p >= 1.0) {
    always_ = true;
  } else {
    threshold_ = static_cast<std::uint64_t>(std::ldexp(p, 64));
  }
}

bool OmegaField::open(const Site& s) const {
  if (always_) return true;
  return hash_site(seed_, stream_, s, 0) < threshold_;
}

double UniformField::operator()(const Site& s, std::uint32_t draw) const {
  const std::uint64_t h = hash_site(seed_, stream_, s, draw);
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

CompositeMedium::CompositeMedium(const Medium& left, const Medium& right, std::array<double, kMaxDim> mid,
                                 std::array<double, kMaxDim> normal, int d)
    : left_(left), right_(right), mid_(mid), normal_(normal), d_(d) {
  double nn = 0;
  for (int i = 0; i < d; ++i) nn += normal[i] * normal[i];
  if (nn == 0) throw std::invalid_argument("composite medium needs a nonzero normal");
}

bool CompositeMedium::left_side(const Vec& x) const {
  double dot = 0;
  for (int i = 0; i < d_; ++i) dot += (static_cast<double>(x[i]) - mid_[i]) * normal_[i];
  return dot <= 0;
}

bool CompositeMedium::open(const Site& s) const { return left_side(s.x) ? left_.open(s) : right_.open(s); }

bool sample_omega(const OmegaField& field, const Site& s) { return field.open(s); }

double sample_uniform(const UniformField& field, const Site& s, std::uint32_t draw) { return field(s, draw); }

bool composite_omega(const OmegaField& left, const OmegaField& right, const std::array<double, kMaxDim>& mid,
                     const std::array<double, kMaxDim>& normal, int d, const Site& s) {
  if (left.p() != right.p()) throw std::invalid_argument("composite media must share p");
  return CompositeMedium(left, right, mid, normal, d).open(s);
}

}  // namespace llab
