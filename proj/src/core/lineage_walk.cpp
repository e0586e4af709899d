#include "lineage_walk.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

namespace llab {

void KappaSpec::validate() const {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("kernel: dimension must be 1, 2 or 3");
  if (R_ref < 0 || R_loc < R_ref) throw std::invalid_argument("kernel: need 0 <= R_ref <= R_loc");
  if (R_kappa < R_ref || R_kappa < 1) throw std::invalid_argument("kernel: need R_kappa >= max(R_ref, 1)");
  double total = 0;
  for (const auto& [z, w] : kappa_ref) {
    if (w < 0) throw std::invalid_argument("kernel: negative reference weight");
    if (w > 0 && sup_norm(z, d) > R_ref) throw std::invalid_argument("kernel: reference weight outside R_ref");
    double mirror = 0;
    for (const auto& [y, v] : kappa_ref)
      if (y == neg(z)) mirror = v;
    if (std::abs(mirror - w) > 1e-12) throw std::invalid_argument("kernel: reference kernel not symmetric");
    total += w;
  }
  if (!kappa_ref.empty() && std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("kernel: reference weights must sum to 1");
}

WeightMap KappaSpec::reference() const {
  if (!kappa_ref.empty()) {
    WeightMap w = kappa_ref;
    std::sort(w.begin(), w.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return w;
  }
  WeightMap w;
  const auto ball = sup_ball(d, R_ref);
  for (const Vec& z : ball) w.emplace_back(z, 1.0 / static_cast<double>(ball.size()));
  return w;
}

Kernel kappa_backbone(EtaSource& eta, const KappaSpec& spec, std::int64_t k, const Vec& x, bool* fallback) {
  thread_local KappaSpec cached_spec;
  thread_local WeightMap ref;
  if (ref.empty() || cached_spec.d != spec.d || cached_spec.R_ref != spec.R_ref ||
      cached_spec.kappa_ref != spec.kappa_ref) {
    cached_spec = spec;
    ref = spec.reference();
  }
  Kernel out;
  double total = 0;
  for (const auto& [z, w] : ref) {
    if (w <= 0) continue;
    if (eta.eta(Site{add(x, z), -k - 1})) {
      out.emplace_back(z, w);
      total += w;
    }
  }
  if (fallback) *fallback = total <= 0;
  if (total <= 0) {
    out.clear();
    const auto ball = sup_ball(spec.d, spec.R_kappa);
    for (const Vec& z : ball) out.emplace_back(z, 1.0 / static_cast<double>(ball.size()));
    return out;
  }
  for (auto& [z, w] : out) w /= total;
  return out;
}

Kernel kappa_lineage(const LbrwParams& params, const PopTrajectory& traj, std::int64_t k, const Vec& x) {
  if (traj.slices.empty()) throw WindowUnderflow("empty trajectory window; extend burn-in window");
  return ancestral_kernel(params, traj.at_time(traj.back().time - k - 1), x);
}

WalkState step_walk(const WalkState& state, const Kernel& kernel, const UniformField& U) {
  if (kernel.empty()) throw std::invalid_argument("step_walk: empty kernel");
  const double u = U(Site{state.pos, -state.k}, 0);
  double cdf = 0;
  const Vec* pick = nullptr;
  for (const auto& [z, w] : kernel) {
    if (w <= 0) continue;
    pick = &z;
    cdf += w;
    if (u <= cdf) break;
  }
  if (!pick) throw std::invalid_argument("step_walk: kernel has no mass");
  return WalkState{state.k + 1, add(state.pos, *pick), state.stream};
}

double tv_distance(const Kernel& a, const Kernel& b) {
  std::map<Vec, double> diff;
  for (const auto& [z, w] : a) diff[z] += w;
  for (const auto& [z, w] : b) diff[z] -= w;
  double s = 0;
  for (const auto& [z, v] : diff) s += std::abs(v);
  return 0.5 * s;
}

PairRunner::PairRunner(EtaSource& eta1, EtaSource& eta2, const KappaSpec& spec, const UniformField& u1,
                       const UniformField& u2, const Vec& x0, const Vec& x0p, std::int64_t k0)
    : eta_{&eta1, &eta2}, spec_(spec), u_{u1, u2}, k0_(k0) {
  spec_.validate();
  paths_[0].push_back(x0);
  paths_[1].push_back(x0p);
}

void PairRunner::step() {
  const std::int64_t kk = k();
  for (int w = 0; w < 2; ++w) {
    bool fb = false;
    const Kernel ker = kappa_backbone(*eta_[w], spec_, kk, paths_[w].back(), &fb);
    fallbacks_ += fb;
    paths_[w].push_back(step_walk(WalkState{kk, paths_[w].back(), u_[w].stream()}, ker, u_[w]).pos);
  }
}

PairPaths run_pair(const PairSetup& s, std::int64_t horizon) {
  const OmegaField w1(s.seed, medium_stream(s.medium1), s.p);
  const OmegaField w2(s.seed, medium_stream(s.medium2), s.p);
  EtaOracle e1(w1, s.spec.d, s.m_relax);
  std::unique_ptr<EtaOracle> e2;
  if (s.mode == PairMode::ind) e2 = std::make_unique<EtaOracle>(w2, s.spec.d, s.m_relax);
  PairRunner runner(e1, e2 ? *e2 : e1, s.spec, UniformField(s.seed, walk_stream(s.walk1)),
                    UniformField(s.seed, walk_stream(s.walk2)), s.x0, s.x0p);
  runner.advance_to(horizon);
  return PairPaths{runner.path(0), runner.path(1), runner.fallbacks()};
}

std::vector<Vec> run_lineage(const LbrwParams& params, const PopTrajectory& traj, const UniformField& U, const Vec& x0,
                             std::int64_t horizon) {
  std::vector<Vec> path{x0};
  WalkState st{0, x0, U.stream()};
  for (std::int64_t k = 0; k < horizon; ++k) {
    st = step_walk(st, kappa_lineage(params, traj, k, st.pos), U);
    path.push_back(traj.back().wrap(st.pos));
    st.pos = path.back();
  }
  return path;
}

void write_path_csv(std::ostream& out, const std::vector<Vec>& path, int d, std::int64_t k0) {
  out << 'k';
  for (int i = 0; i < d; ++i) out << ",x" << i + 1;
  out << '\n';
  for (std::size_t j = 0; j < path.size(); ++j) {
    out << k0 + static_cast<std::int64_t>(j);
    for (int i = 0; i < d; ++i) out << ',' << path[j][i];
    out << '\n';
  }
}

void write_spec_json(std::ostream& out, const KappaSpec& spec) {
  nlohmann::ordered_json j;
  j["kind"] = spec.kind == KappaKind::backbone ? "backbone" : "lbrw";
  j["d"] = spec.d;
  j["R_loc"] = spec.R_loc;
  j["R_ref"] = spec.R_ref;
  j["R_kappa"] = spec.R_kappa;
  auto& ref = j["kappa_ref"] = nlohmann::ordered_json::array();
  for (const auto& [z, w] : spec.reference())
    ref.push_back({{"z", std::vector<std::int64_t>(z.begin(), z.begin() + spec.d)}, {"weight", w}});
  out << j.dump(2) << '\n';
}

}  // namespace llab
