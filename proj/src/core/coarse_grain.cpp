#include "coarse_grain.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "parallel.hpp"

namespace llab {

void BlockSpec::validate() const {
  if (L_s < 1 || L_t < 1) throw std::invalid_argument("BlockSpec: L_s and L_t must be positive");
  if (R_eta < 0) throw std::invalid_argument("BlockSpec: R_eta must be nonnegative");
}

std::int64_t k_eta(const BlockSpec& spec) {
  spec.validate();
  return spec.R_eta * ((spec.L_t + spec.L_s - 1) / spec.L_s + 1);
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

std::int64_t radius4(const CoarseSetup& s) { return 4 * s.block.L_s; }

std::int64_t pad(const CoarseSetup& s) { return s.lbrw.migration_range() + s.lbrw.competition_range(); }

Vec centre_of(const CoarseSetup& s, const Vec& cx) {
  Vec c{};
  for (int i = 0; i < s.d(); ++i) c[i] = s.block.L_s * cx[i];
  return c;
}

std::uint64_t block_key(const Vec& cx, std::int64_t cn) {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(cn));
  for (int i = 0; i < kMaxDim; ++i) h = mix64(h ^ static_cast<std::uint64_t>(cx[i] + 0x1000));
  return h;
}

}  // namespace

std::int64_t cg_pi(std::int64_t x, std::int64_t L_s) {
  if (L_s < 1) throw std::invalid_argument("cg_pi: L_s must be positive");
  return ceil_div(2 * x - L_s, 2 * L_s);
}

std::int64_t cg_rho(std::int64_t x, std::int64_t L_s) { return x - cg_pi(x, L_s) * L_s; }

Vec cg_pi(const Vec& x, std::int64_t L_s, int d) {
  Vec r{};
  for (int i = 0; i < d; ++i) r[i] = cg_pi(x[i], L_s);
  return r;
}

Vec cg_rho(const Vec& x, std::int64_t L_s, int d) {
  Vec r{};
  for (int i = 0; i < d; ++i) r[i] = cg_rho(x[i], L_s);
  return r;
}

Noise noise_from(const UniformField& U) {
  return [U](const Site& s) { return U(s, 0); };
}

void CoarseSetup::validate() const {
  lbrw.validate();
  block.validate();
  if (band.lo > band.hi) throw std::invalid_argument("CoarseSetup: band lower edge above upper edge");
  if (calibration_pairs < 0) throw std::invalid_argument("CoarseSetup: calibration_pairs must be nonnegative");
  if (block.R_eta < pad(*this))
    throw std::invalid_argument("CoarseSetup: R_eta below the migration plus competition range");
}

bool eta_good(const PopState& slice, const Vec& centre, std::int64_t radius, const Band& band) {
  for (const Vec& z : sup_ball(slice.dim(), radius))
    if (!band.contains(slice.at(add(centre, z)))) return false;
  return true;
}

PopState footprint_slice(const CoarseSetup& setup, const Vec& /*cx*/, std::int64_t cn) {
  const std::int64_t r = radius4(setup) + pad(setup);
  return PopState(setup.d(), 2 * r + 1, -r, cn * setup.block.L_t);
}

PopState block_flow(const CoarseSetup& setup, const Noise& noise, const Vec& cx, std::int64_t /*cn*/, PopState state,
                    const std::function<void(const PopState&)>& on_step) {
  const int d = setup.d();
  const Vec c = centre_of(setup, cx);
  const std::int64_t r4 = radius4(setup);
  const std::size_t n = state.size();
  std::vector<std::size_t> inside;
  for (std::size_t i = 0; i < n; ++i) {
    if (sup_norm(state.coords(i), d) <= r4) inside.push_back(i);
    else state[i] = 0;
  }
  std::vector<double> f(n, 0.0);
  for (std::int64_t s = 0; s < setup.block.L_t; ++s) {
    for (std::size_t i : inside) f[i] = state[i] ? mean_offspring(setup.lbrw, state, state.coords(i)) : 0.0;
    PopState next(d, state.side(), state.lo(), state.time + 1);
    for (std::size_t i : inside) {
      const Vec x = state.coords(i);
      double mu = 0;
      for (const auto& [z, w] : setup.lbrw.p_mig) {
        const Vec y = sub(x, z);
        if (sup_norm(y, d) <= r4) mu += w * f[state.index(y)];
      }
      next[i] = mu > 0 ? poisson_inverse(mu, noise(Site{add(x, c), next.time})) : 0;
    }
    state = std::move(next);
    if (on_step) on_step(state);
  }
  return state;
}

PopState reference_bottom(const CoarseSetup& setup, const Vec& cx, std::int64_t cn) {
  PopState s = footprint_slice(setup, cx, cn);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = setup.band.mid();
  return s;
}

PopState random_good_bottom(const CoarseSetup& setup, const Vec& cx, std::int64_t cn, std::mt19937_64& rng) {
  PopState s = footprint_slice(setup, cx, cn);
  std::uniform_int_distribution<std::uint32_t> in_band(setup.band.lo, setup.band.hi), any(0, setup.band.hi);
  const std::int64_t r2 = 2 * setup.block.L_s;
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = sup_norm(s.coords(i), setup.d()) <= r2 ? in_band(rng) : any(rng);
  return s;
}

bool pair_contracts(const CoarseSetup& setup, const Vec& /*cx*/, const PopState& a, const PopState& b) {
  const std::int64_t r3 = 3 * setup.block.L_s;
  for (const Vec& y : sup_ball(setup.d(), r3))
    if (a.at(y) != b.at(y) || !setup.band.contains(a.at(y))) return false;
  return true;
}

BlockFlags block_good(const CoarseSetup& setup, const Noise& noise, const Vec& cx, std::int64_t cn) {
  BlockFlags f;
  f.reference_in_band = true;
  const std::int64_t r2 = 2 * setup.block.L_s, r3 = 3 * setup.block.L_s;
  const PopState top = block_flow(setup, noise, cx, cn, reference_bottom(setup, cx, cn), [&](const PopState& s) {
    if (f.reference_in_band && !eta_good(s, Vec{}, r2, setup.band)) f.reference_in_band = false;
  });
  f.reference_top_good = eta_good(top, Vec{}, r3, setup.band);
  std::mt19937_64 rng(mix64(setup.seed ^ block_key(cx, cn)));
  for (int k = 0; k < setup.calibration_pairs; ++k) {
    const PopState t1 = block_flow(setup, noise, cx, cn, random_good_bottom(setup, cx, cn, rng));
    const PopState t2 = block_flow(setup, noise, cx, cn, random_good_bottom(setup, cx, cn, rng));
    if (!pair_contracts(setup, cx, t1, t2)) break;
    ++f.pairs_coupled;
  }
  f.good_U = f.reference_in_band && f.reference_top_good && f.pairs_coupled == setup.calibration_pairs;
  return f;
}

double verify_contraction(const CoarseSetup& setup, const Noise& noise, const Vec& cx, std::int64_t cn, int trials,
                          std::uint64_t pair_seed) {
  if (trials <= 0) throw std::invalid_argument("verify_contraction: trials must be positive");
  std::mt19937_64 rng(mix64(pair_seed ^ mix64(block_key(cx, cn) + 1)));
  int pass = 0;
  for (int k = 0; k < trials; ++k) {
    const PopState t1 = block_flow(setup, noise, cx, cn, random_good_bottom(setup, cx, cn, rng));
    const PopState t2 = block_flow(setup, noise, cx, cn, random_good_bottom(setup, cx, cn, rng));
    pass += pair_contracts(setup, cx, t1, t2);
  }
  return static_cast<double>(pass) / trials;
}

std::size_t CoarseField::cells_per_layer() const {
  std::size_t c = 1;
  for (int i = 0; i < d; ++i) c *= static_cast<std::size_t>(width);
  return c;
}

bool CoarseField::inside(const Vec& cx, std::int64_t cn) const {
  if (cn < n0 || cn >= n0 + layers) return false;
  for (int i = 0; i < d; ++i)
    if (cx[i] < lo[i] || cx[i] >= lo[i] + width) return false;
  return true;
}

std::size_t CoarseField::index(const Vec& cx, std::int64_t cn) const {
  if (!inside(cx, cn)) throw std::out_of_range("CoarseField: block outside window");
  std::size_t i = 0;
  for (int k = d - 1; k >= 0; --k) i = i * static_cast<std::size_t>(width) + static_cast<std::size_t>(cx[k] - lo[k]);
  return static_cast<std::size_t>(cn - n0) * cells_per_layer() + i;
}

Vec CoarseField::coords(std::size_t i) const {
  Vec x{};
  for (int k = 0; k < d; ++k) {
    x[k] = lo[k] + static_cast<std::int64_t>(i % static_cast<std::size_t>(width));
    i /= static_cast<std::size_t>(width);
  }
  return x;
}

CoarseField build_coarse_field(const CoarseSetup& setup, const Noise& noise, const Vec& lo, std::int64_t width,
                               std::int64_t n0, std::int64_t layers, int workers) {
  setup.validate();
  if (width < 1 || layers < 1) throw std::invalid_argument("build_coarse_field: empty window");
  CoarseField F;
  F.d = setup.d();
  F.lo = lo;
  F.width = width;
  F.n0 = n0;
  F.layers = layers;
  const std::size_t per = F.cells_per_layer();
  F.U.assign(per * static_cast<std::size_t>(layers), 0);
  parallel_for(F.U.size(), workers, [&](std::size_t i) {
    const Vec cx = F.coords(i % per);
    const std::int64_t cn = n0 + static_cast<std::int64_t>(i / per);
    F.U[i] = block_good(setup, noise, cx, cn).good_U;
  });
  F.xi = F.U;
  for (std::int64_t L = 1; L < layers; ++L)
    for (std::size_t c = 0; c < per; ++c) {
      const std::size_t i = static_cast<std::size_t>(L) * per + c;
      if (!F.U[i]) continue;
      bool reach = false;
      for (const Vec& z : sup_ball(F.d, 1)) {
        const Vec y = add(F.coords(c), z);
        if (F.inside(y, n0 + L - 1) && F.xi[F.index(y, n0 + L - 1)]) {
          reach = true;
          break;
        }
      }
      F.xi[i] = reach;
    }
  return F;
}

DCluster determining_cluster(const XiOracle& xi, const Vec& cx, std::int64_t cn, std::int64_t K, int d,
                             std::int64_t height_cap) {
  DCluster c;
  c.seed_x = cx;
  c.seed_n = cn;
  c.members.insert({cn, cx});
  std::set<Vec> layer{cx};
  std::int64_t k = cn;
  while (true) {
    std::vector<Vec> failing;
    for (const Vec& y : layer)
      if (!xi(y, k)) failing.push_back(y);
    if (failing.empty()) break;
    if (c.height >= height_cap) {
      c.partial = true;
      break;
    }
    std::set<Vec> below;
    for (const Vec& y : failing)
      for (const Vec& z : sup_ball(d, K)) below.insert(add(y, z));
    --k;
    ++c.height;
    for (const Vec& z : below) c.members.insert({k, z});
    layer = std::move(below);
  }
  return c;
}

CgPath cg_walk(const std::vector<Vec>& path, const BlockSpec& spec, int d) {
  spec.validate();
  CgPath out;
  for (std::size_t k = 0; k < path.size(); k += static_cast<std::size_t>(spec.L_t)) {
    out.coarse.push_back(cg_pi(path[k], spec.L_s, d));
    out.offset.push_back(cg_rho(path[k], spec.L_s, d));
  }
  return out;
}

void write_block_csv(std::ostream& out, const std::vector<BlockReport>& rows, int d) {
  for (int i = 0; i < d; ++i) out << 'x' << i + 1 << ',';
  out << "n,good_U,good_eta,cluster_height,cluster_partial,pass_fraction\n";
  for (const BlockReport& r : rows) {
    for (int i = 0; i < d; ++i) out << r.cx[i] << ',';
    out << r.cn << ',' << r.good_U << ',' << r.good_eta << ',' << r.cluster_height << ',' << r.cluster_partial << ',';
    if (r.pass_fraction >= 0) out << r.pass_fraction;
    out << '\n';
  }
}

}  // namespace llab
