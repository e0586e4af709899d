#include "lbrw_env.hpp"

#include <boost/math/distributions/poisson.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace llab {

namespace {

std::int64_t range_of(const WeightMap& w, int d) {
  std::int64_t r = 0;
  for (const auto& [z, v] : w)
    if (v > 0) r = std::max(r, sup_norm(z, d));
  return r;
}

double weight_at(const WeightMap& w, const Vec& z) {
  for (const auto& [y, v] : w)
    if (y == z) return v;
  return 0.0;
}

}  // namespace

void LbrwParams::validate() const {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("lbrw: dimension must be 1, 2 or 3");
  if (!(m > 1.0)) throw std::invalid_argument("lbrw: offspring mean m must exceed 1");
  if (!(lambda0 > 0.0)) throw std::invalid_argument("lbrw: lambda0 must be positive");
  double total = 0;
  for (const auto& [z, v] : p_mig) {
    if (v < 0) throw std::invalid_argument("lbrw: negative migration weight");
    if (std::abs(v - weight_at(p_mig, neg(z))) > 1e-12) throw std::invalid_argument("lbrw: migration kernel not symmetric");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("lbrw: migration weights must sum to 1");
  for (const auto& [z, v] : lambda) {
    if (v < 0) throw std::invalid_argument("lbrw: negative competition weight");
    if (sup_norm(z, d) == 0) throw std::invalid_argument("lbrw: competition kernel must not contain 0; use lambda0");
    if (std::abs(v - weight_at(lambda, neg(z))) > 1e-12) throw std::invalid_argument("lbrw: competition kernel not symmetric");
  }
}

std::vector<std::string> LbrwParams::warnings() const {
  std::vector<std::string> out;
  if (!(m > 1.0 && m < 3.0)) out.push_back("offspring mean m outside (1,3)");
  double s = lambda0;
  for (const auto& [z, v] : lambda) s += v;
  if (s > 0.25) out.push_back("total competition weight exceeds 0.25");
  return out;
}

std::int64_t LbrwParams::migration_range() const { return range_of(p_mig, d); }
std::int64_t LbrwParams::competition_range() const { return range_of(lambda, d); }

WeightMap LbrwParams::nearest_neighbour(int d) {
  WeightMap w;
  const auto ball = sup_ball(d, 1);
  for (const Vec& z : ball) w.emplace_back(z, 1.0 / static_cast<double>(ball.size()));
  return w;
}

PopState::PopState(int d, std::int64_t side, std::int64_t lo, std::int64_t t)
    : time(t), d_(d), side_(side), lo_(lo) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("PopState: dimension must be 1, 2 or 3");
  if (side < 1) throw std::invalid_argument("PopState: side must be positive");
  std::size_t n = 1;
  for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(side);
  counts_.assign(n, 0);
}

Vec PopState::wrap(const Vec& x) const {
  Vec y{};
  for (int i = 0; i < d_; ++i) {
    std::int64_t r = (x[i] - lo_) % side_;
    if (r < 0) r += side_;
    y[i] = lo_ + r;
  }
  return y;
}

std::size_t PopState::index(const Vec& x) const {
  std::size_t idx = 0;
  for (int i = 0; i < d_; ++i) {
    std::int64_t r = (x[i] - lo_) % side_;
    if (r < 0) r += side_;
    idx = idx * static_cast<std::size_t>(side_) + static_cast<std::size_t>(r);
  }
  return idx;
}

Vec PopState::coords(std::size_t idx) const {
  Vec x{};
  for (int i = d_ - 1; i >= 0; --i) {
    x[i] = lo_ + static_cast<std::int64_t>(idx % static_cast<std::size_t>(side_));
    idx /= static_cast<std::size_t>(side_);
  }
  return x;
}

std::uint64_t PopState::total() const {
  std::uint64_t s = 0;
  for (auto c : counts_) s += c;
  return s;
}

std::map<Vec, std::uint32_t> PopState::to_map() const {
  std::map<Vec, std::uint32_t> out;
  for (std::size_t i = 0; i < counts_.size(); ++i)
    if (counts_[i] > 0) out.emplace(coords(i), counts_[i]);
  return out;
}

const PopState& PopTrajectory::at_time(std::int64_t t) const {
  if (slices.empty() || t < slices.front().time || t > slices.back().time)
    throw WindowUnderflow("trajectory window does not cover time " + std::to_string(t) + "; extend burn-in window");
  return slices[static_cast<std::size_t>(t - slices.front().time)];
}

double mean_offspring(const LbrwParams& params, const PopState& zeta, const Vec& x) {
  const double own = zeta.at(x);
  if (own == 0) return 0.0;
  double r = params.m - params.lambda0 * own;
  for (const auto& [z, w] : params.lambda) r -= w * zeta.at(add(x, z));
  return r > 0 ? own * r : 0.0;
}

std::uint32_t poisson_inverse(double mean, double u) {
  if (mean <= 0) return 0;
  if (mean > 500) {
    using namespace boost::math::policies;
    using Dist = boost::math::poisson_distribution<double, policy<discrete_quantile<integer_round_up>>>;
    return static_cast<std::uint32_t>(boost::math::quantile(Dist(mean), u));
  }
  double pk = std::exp(-mean), cdf = pk;
  std::uint32_t k = 0;
  const double cap = mean + 40.0 * std::sqrt(mean) + 40.0;
  while (u > cdf && k < cap) {
    ++k;
    pk *= mean / k;
    cdf += pk;
  }
  return k;
}

PopState step_population(const LbrwParams& params, const PopState& state, const UniformField& U) {
  const std::size_t n = state.size();
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = state[i] ? mean_offspring(params, state, state.coords(i)) : 0.0;
  PopState next(state.dim(), state.side(), state.lo(), state.time + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec x = state.coords(i);
    double mu = 0;
    for (const auto& [z, w] : params.p_mig) mu += w * f[state.index(sub(x, z))];
    next[i] = mu > 0 ? poisson_inverse(mu, U(Site{x, next.time}, 0)) : 0;
  }
  return next;
}

PopTrajectory burn_in(const LbrwParams& params, const PopState& init, const UniformField& U, std::int64_t steps,
                      std::int64_t keep) {
  if (steps < 0) throw std::invalid_argument("burn_in: steps must be nonnegative");
  PopTrajectory traj;
  traj.slices.push_back(init);
  for (std::int64_t s = 0; s < steps; ++s) {
    traj.slices.push_back(step_population(params, traj.slices.back(), U));
    if (static_cast<std::int64_t>(traj.slices.size()) > keep + 1) traj.slices.erase(traj.slices.begin());
    if (traj.slices.back().extinct()) {
      const std::int64_t t_end = init.time + steps;
      while (traj.slices.back().time < t_end) {
        PopState z = traj.slices.back();
        z.time += 1;
        traj.slices.push_back(std::move(z));
        if (static_cast<std::int64_t>(traj.slices.size()) > keep + 1) traj.slices.erase(traj.slices.begin());
      }
      break;
    }
  }
  traj.extinct = traj.slices.back().extinct();
  return traj;
}

PopTrajectory burn_in_surviving(const LbrwParams& params, const PopState& init, std::uint64_t seed,
                                std::uint32_t first_stream, std::int64_t steps, std::int64_t keep, int max_restarts) {
  PopTrajectory traj;
  for (int r = 0; r <= max_restarts; ++r) {
    traj = burn_in(params, init, UniformField(seed, medium_stream(first_stream + static_cast<std::uint32_t>(r))), steps,
                   keep);
    traj.restarts = r;
    if (!traj.extinct) break;
  }
  return traj;
}

WeightMap ancestral_kernel(const LbrwParams& params, const PopState& eta_prev, const Vec& x) {
  WeightMap out;
  double total = 0;
  for (const auto& [z, w] : params.p_mig) {
    const double v = w * mean_offspring(params, eta_prev, sub(x, z));
    if (v > 0) {
      out.emplace_back(neg(z), v);
      total += v;
    }
  }
  if (total <= 0) {
    out.clear();
    const auto ball = sup_ball(params.d, params.migration_range());
    for (const Vec& z : ball) out.emplace_back(z, 1.0 / static_cast<double>(ball.size()));
    return out;
  }
  for (auto& [z, v] : out) v /= total;
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

void dump_trajectory_jsonl(std::ostream& out, const PopTrajectory& traj) {
  for (const PopState& s : traj.slices) {
    out << "{\"time\":" << s.time << ",\"sites\":[";
    bool first = true;
    for (const auto& [x, c] : s.to_map()) {
      if (!first) out << ',';
      first = false;
      out << "{\"x\":[";
      for (int i = 0; i < s.dim(); ++i) out << (i ? "," : "") << x[i];
      out << "],\"count\":" << c << '}';
    }
    out << "]}\n";
  }
}

}  // namespace llab
