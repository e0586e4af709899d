#ifndef LINEAGELAB_RNG_FIELD_HPP
#define LINEAGELAB_RNG_FIELD_HPP

#include <cstdint>
#include <functional>

#include "lattice.hpp"

namespace llab {

/// Spatial coordinates must satisfy |x_i| < 2^20 and time must fit in 32 bits.
inline constexpr std::int64_t kCoordLimit = std::int64_t{1} << 20;
inline constexpr std::int64_t kTimeLimit = std::int64_t{1} << 31;

std::uint64_t mix64(std::uint64_t z);

/// Counter-based hash of (seed, stream, x1, x2, x3, n, draw).
///
/// Packing: word A holds x1, x2, x3 as 21-bit offsets (x_i + 2^20) in bits
/// 0-20, 21-41, 42-62; word B holds n + 2^31 in bits 0-31 and draw in bits
/// 32-63. The packing is injective on the supported box; the two words are
/// folded into a key derived from (seed, stream) by two mixing rounds.
std::uint64_t hash_site(std::uint64_t seed, std::uint32_t stream, const Site& s, std::uint32_t draw);

/// Stream ids below 2^31 are medium streams, ids with the top bit set are walk streams.
inline constexpr std::uint32_t medium_stream(std::uint32_t i) { return i & 0x7fffffffu; }
inline constexpr std::uint32_t walk_stream(std::uint32_t i) { return 0x80000000u | i; }

/// A {0,1}-valued space-time medium.
class Medium {
 public:
  virtual ~Medium() = default;
  virtual bool open(const Site& s) const = 0;
};

/// I.i.d. Bernoulli(p) field keyed by (seed, stream).
class OmegaField final : public Medium {
 public:
  OmegaField(std::uint64_t seed, std::uint32_t stream, double p);
  bool open(const Site& s) const override;
  std::uint64_t seed() const { return seed_; }
  std::uint32_t stream() const { return stream_; }
  double p() const { return p_; }

 private:
  std::uint64_t seed_;
  std::uint32_t stream_;
  double p_;
  bool always_ = false;
  std::uint64_t threshold_ = 0;
};

/// I.i.d. Uniform(0,1) field indexed by (site, draw).
class UniformField {
 public:
  UniformField(std::uint64_t seed, std::uint32_t stream) : seed_(seed), stream_(stream) {}
  double operator()(const Site& s, std::uint32_t draw = 0) const;
  std::uint64_t seed() const { return seed_; }
  std::uint32_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint32_t stream_;
};

class ConstantMedium final : public Medium {
 public:
  explicit ConstantMedium(bool value) : value_(value) {}
  bool open(const Site&) const override { return value_; }

 private:
  bool value_;
};

/// Left medium on the closed half-space (x - mid).normal <= 0, right medium elsewhere.
class CompositeMedium final : public Medium {
 public:
  CompositeMedium(const Medium& left, const Medium& right, std::array<double, kMaxDim> mid,
                  std::array<double, kMaxDim> normal, int d);
  bool open(const Site& s) const override;
  bool left_side(const Vec& x) const;

 private:
  const Medium& left_;
  const Medium& right_;
  std::array<double, kMaxDim> mid_;
  std::array<double, kMaxDim> normal_;
  int d_;
};

/// Arbitrary predicate, used for shifted, reflected or patched media.
class FunctionMedium final : public Medium {
 public:
  explicit FunctionMedium(std::function<bool(const Site&)> f) : f_(std::move(f)) {}
  bool open(const Site& s) const override { return f_(s); }

 private:
  std::function<bool(const Site&)> f_;
};

bool sample_omega(const OmegaField& field, const Site& s);
double sample_uniform(const UniformField& field, const Site& s, std::uint32_t draw);
bool composite_omega(const OmegaField& left, const OmegaField& right, const std::array<double, kMaxDim>& mid,
                     const std::array<double, kMaxDim>& normal, int d, const Site& s);

}  // namespace llab

#endif
