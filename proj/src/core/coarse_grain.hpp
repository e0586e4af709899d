#ifndef LINEAGELAB_COARSE_GRAIN_HPP
#define LINEAGELAB_COARSE_GRAIN_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <set>
#include <vector>

#include "lbrw_env.hpp"

namespace llab {

struct BlockSpec {
  std::int64_t L_s = 5;
  std::int64_t L_t = 20;
  std::int64_t R_eta = 1;  // environment interaction range
  void validate() const;
};

std::int64_t k_eta(const BlockSpec& spec);

/// Nearest coarse index, ties rounded down: ceil(x / L_s - 1/2).
std::int64_t cg_pi(std::int64_t x, std::int64_t L_s);
std::int64_t cg_rho(std::int64_t x, std::int64_t L_s);
Vec cg_pi(const Vec& x, std::int64_t L_s, int d);
Vec cg_rho(const Vec& x, std::int64_t L_s, int d);

/// Per-site count band used as the good-configuration predicate.
struct Band {
  std::uint32_t lo = 2, hi = 40;
  std::uint32_t mid() const { return (lo + hi) / 2; }
  bool contains(std::uint32_t c) const { return lo <= c && c <= hi; }
};

/// Noise source u(site); block flows read it at (x, t) for t in (n L_t, (n+1) L_t].
using Noise = std::function<double(const Site&)>;
Noise noise_from(const UniformField& U);

struct CoarseSetup {
  LbrwParams lbrw;
  BlockSpec block;
  Band band;
  int calibration_pairs = 8;
  std::uint64_t seed = 1;
  int d() const { return lbrw.d; }
  void validate() const;
};

/// All counts on the sup-norm ball of the given radius lie in the band.
bool eta_good(const PopState& slice, const Vec& centre, std::int64_t radius, const Band& band);

/// Slice on the block's footprint (radius 4 L_s around L_s * cx) at time n L_t, padded
/// with empty sites so the dynamics never wrap.
PopState footprint_slice(const CoarseSetup& setup, const Vec& cx, std::int64_t cn);

/// Runs the flow through the block with noise restricted to the footprint; sites
/// outside the footprint stay empty. `on_step` sees every intermediate slice.
PopState block_flow(const CoarseSetup& setup, const Noise& noise, const Vec& cx, std::int64_t cn, PopState bottom,
                    const std::function<void(const PopState&)>& on_step = {});

PopState reference_bottom(const CoarseSetup& setup, const Vec& cx, std::int64_t cn);
/// Band-uniform counts on the 2 L_s ball, arbitrary counts in [0, hi] elsewhere on the footprint.
PopState random_good_bottom(const CoarseSetup& setup, const Vec& cx, std::int64_t cn, std::mt19937_64& rng);

/// Pair outcome at the top: agreement on the 3 L_s ball and both copies in band there.
bool pair_contracts(const CoarseSetup& setup, const Vec& cx, const PopState& top1, const PopState& top2);

struct BlockFlags {
  bool reference_in_band = false;  // 2 L_s ball at every step
  bool reference_top_good = false;  // 3 L_s ball at the top
  int pairs_coupled = 0;
  bool good_U = false;
};

/// Calibration pairs are drawn from a stream distinct from verify_contraction's.
BlockFlags block_good(const CoarseSetup& setup, const Noise& noise, const Vec& cx, std::int64_t cn);

/// Fraction of `trials` fresh good bottom pairs that contract under the block's noise.
double verify_contraction(const CoarseSetup& setup, const Noise& noise, const Vec& cx, std::int64_t cn, int trials,
                          std::uint64_t pair_seed);

/// Coarse fields on the window [lo, lo + width)^d x [n0, n0 + layers).
struct CoarseField {
  int d = 1;
  Vec lo{};
  std::int64_t width = 0;
  std::int64_t n0 = 0, layers = 0;
  std::vector<std::uint8_t> U;    // good-noise indicator
  std::vector<std::uint8_t> xi;   // coarse contact process on U
  std::size_t index(const Vec& cx, std::int64_t cn) const;
  bool inside(const Vec& cx, std::int64_t cn) const;
  std::size_t cells_per_layer() const;
  Vec coords(std::size_t i) const;  // spatial part of a cell within a layer
};

/// xi(x, n) = U(x, n) * max over |y - x| <= 1 of xi(y, n - 1); the bottom layer is U.
CoarseField build_coarse_field(const CoarseSetup& setup, const Noise& noise, const Vec& lo, std::int64_t width,
                               std::int64_t n0, std::int64_t layers, int workers = 1);

struct DCluster {
  Vec seed_x{};
  std::int64_t seed_n = 0;
  std::set<std::pair<std::int64_t, Vec>> members;  // (coarse time, coarse position)
  std::int64_t height = 0;
  bool partial = false;  // height cap reached or oracle ran out of window
};

using XiOracle = std::function<bool(const Vec&, std::int64_t)>;
DCluster determining_cluster(const XiOracle& xi, const Vec& cx, std::int64_t cn, std::int64_t K, int d,
                             std::int64_t height_cap);

struct CgPath {
  std::vector<Vec> coarse, offset;
};
/// Samples the path every L_t steps.
CgPath cg_walk(const std::vector<Vec>& path, const BlockSpec& spec, int d);

struct BlockReport {
  Vec cx{};
  std::int64_t cn = 0;
  bool good_U = false, good_eta = false;
  std::int64_t cluster_height = 0;
  bool cluster_partial = false;
  double pass_fraction = -1;  // negative when not evaluated
};

void write_block_csv(std::ostream& out, const std::vector<BlockReport>& rows, int d);

}  // namespace llab

#endif
