#include "regeneration.hpp"

#include <json.hpp>

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace llab {

namespace {

std::int64_t far_corner_sq(const Vec& y, std::int64_t r, const Vec& c, int d) {
  std::int64_t s = 0;
  for (int i = 0; i < d; ++i) {
    const std::int64_t a = std::abs(y[i] - c[i]) + r;
    s += a * a;
  }
  return s;
}

bool fits(std::int64_t dist2, double radius) { return radius >= 0 && static_cast<double>(dist2) <= radius * radius; }

}  // namespace

StepTrace trace_step(EtaSource& eta, const Vec& pos, std::int64_t k, int R_loc) {
  StepTrace tr;
  tr.pos = pos;
  tr.D = k;
  for (const Vec& z : sup_ball(eta.dim(), R_loc)) {
    const Vec y = add(pos, z);
    const int l = eta.ell(Site{y, -k});
    if (l == kEllInf) continue;
    tr.deco.push_back(Decoration{y, l});
    tr.D = std::max(tr.D, k + l + 2);
  }
  return tr;
}

std::int64_t d_n(EtaSource& eta, const std::vector<Vec>& path, std::int64_t n, int R_loc) {
  return trace_step(eta, path.at(static_cast<std::size_t>(n)), n, R_loc).D;
}

bool SigmaTracker::push(std::int64_t k, std::int64_t D) {
  if (!started_) {
    restart(k, D);
    return false;
  }
  runmax_ = std::max(runmax_, D);
  if (runmax_ <= k) {
    runmax_ = D;
    return true;
  }
  return false;
}

void SigmaTracker::restart(std::int64_t, std::int64_t D) {
  started_ = true;
  runmax_ = D;
}

std::vector<std::int64_t> sigma_sim(EtaSource& eta1, EtaSource& eta2, const std::vector<Vec>& path1,
                                    const std::vector<Vec>& path2, std::int64_t horizon, int R_loc) {
  SigmaTracker a, b;
  std::vector<std::int64_t> out;
  for (std::int64_t k = 0; k <= horizon; ++k) {
    const bool sa = a.push(k, d_n(eta1, path1, k, R_loc));
    const bool sb = b.push(k, d_n(eta2, path2, k, R_loc));
    if (sa && sb) out.push_back(k);
  }
  return out;
}

std::pair<TubeSet, TubeSet> decorated_tubes(EtaSource& eta, const std::vector<Vec>& path, std::int64_t n, int R_loc) {
  const int d = eta.dim();
  TubeSet tube{TubeSet::tube, {}}, dtube{TubeSet::dtube, {}};
  for (std::int64_t k = 0; k <= n; ++k) {
    const Vec& x = path.at(static_cast<std::size_t>(k));
    for (const Vec& z : sup_ball(d, R_loc)) {
      const Site s{add(x, z), -k};
      tube.sites.push_back(s);
      if (auto tri = determining_triangle(eta, s)) {
        auto mem = tri->members(d);
        dtube.sites.insert(dtube.sites.end(), mem.begin(), mem.end());
      }
    }
  }
  for (TubeSet* t : {&tube, &dtube}) {
    std::sort(t->sites.begin(), t->sites.end());
    t->sites.erase(std::unique(t->sites.begin(), t->sites.end()), t->sites.end());
  }
  return {std::move(tube), std::move(dtube)};
}

bool is_cone_time_point(const std::vector<Site>& sites, const Vec& base, double b, double s, int d, std::int64_t m,
                        std::int64_t n) {
  if (m >= n) throw std::invalid_argument("is_cone_time_point: need m < n");
  for (const Site& st : sites) {
    if (st.n < -n || st.n > -m) continue;
    if (!fits(norm2_sq(sub(st.x, base), d), b + s * static_cast<double>(n + st.n))) return false;
  }
  return true;
}

bool cone_point_compact(const std::vector<StepTrace>& trace, std::int64_t k_first, std::int64_t lo, std::int64_t hi,
                        const Vec& base, double b, double s, int R_loc, int d) {
  const auto radius = [&](std::int64_t k) { return b + s * static_cast<double>(hi - k); };
  for (std::int64_t k = std::max(k_first, lo); k <= hi; ++k) {
    const StepTrace& tr = trace[static_cast<std::size_t>(k - k_first)];
    if (!fits(far_corner_sq(tr.pos, R_loc, base, d), radius(k))) return false;
  }
  for (std::int64_t k = k_first; k <= hi; ++k) {
    const StepTrace& tr = trace[static_cast<std::size_t>(k - k_first)];
    for (const Decoration& dec : tr.deco)
      for (std::int64_t j = 0; j <= dec.ell + 1; ++j) {
        const std::int64_t kk = k + j;
        if (kk < lo) continue;
        if (kk > hi) break;
        if (!fits(far_corner_sq(dec.y, j, base, d), radius(kk))) return false;
      }
  }
  return true;
}

void RegenParams::validate() const {
  if (!(b_inn < b_out)) throw std::invalid_argument("regeneration: need b_inn < b_out");
  if (!(s_inn < s_out)) throw std::invalid_argument("regeneration: need s_inn < s_out");
  if (!(s_inn > s_max)) throw std::invalid_argument("regeneration: need s_inn > s_max");
  if (s_max < 0) throw std::invalid_argument("regeneration: s_max must be nonnegative");
  if (R_loc < 0) throw std::invalid_argument("regeneration: R_loc must be nonnegative");
  if (horizon < 1) throw std::invalid_argument("regeneration: horizon must be positive");
}

RegenEngine::RegenEngine(PairRunner& runner, const Medium& shell_medium, const RegenParams& params)
    : runner_(runner),
      shell_medium_(shell_medium),
      params_(params),
      d_(runner.eta(0).dim()),
      k_first_(runner.k()),
      T0_(runner.k()) {
  params_.validate();
  shell_cap_ = params_.shell_cap < 0 ? runner.eta(0).m_relax() : params_.shell_cap;
  t_ = llab::schedule(params_.schedule_params(), params_.horizon);
  ball_out_ = euclid_ball(d_, params_.b_out);
  for (int w = 0; w < 2; ++w) {
    traces_[w].push_back(trace_step(runner_.eta(w), runner_.pos(w, T0_), T0_, params_.R_loc));
    sigma_[w].restart(T0_, traces_[w].back().D);
  }
}

bool RegenEngine::eta_ones(int w, std::int64_t m) {
  const Vec& x = runner_.pos(w, m);
  for (const Vec& z : ball_out_)
    if (!runner_.eta(w).eta(Site{add(x, z), -m})) return false;
  return true;
}

bool RegenEngine::contained(int w, std::int64_t lo, std::int64_t hi, const Vec& centre, double radius) const {
  for (std::int64_t k = lo; k <= hi; ++k) {
    const StepTrace& tr = trace(w, k);
    if (static_cast<double>(sup_norm(sub(tr.pos, centre), d_) + params_.R_loc) > radius) return false;
    for (const Decoration& dec : tr.deco)
      if (static_cast<double>(sup_norm(sub(dec.y, centre), d_) + dec.ell + 1) > radius) return false;
  }
  return true;
}

bool RegenEngine::attempt(std::int64_t m, RegenRecord& rec) {
  const std::int64_t r = m - T0_;
  const std::int64_t prev = t_[static_cast<std::size_t>(ell_ - 1)];
  for (int w = 0; w < 2; ++w)
    if (!cone_point_compact(traces_[w], k_first_, T0_ + prev, m, runner_.pos(w, m), params_.b_inn, params_.s_inn,
                            params_.R_loc, d_)) {
      ++failures_[kConePoint];
      return false;
    }
  if (ell_ >= 2) {
    const double lim = params_.s_max * static_cast<double>(r);
    for (int w = 0; w < 2; ++w)
      if (!fits(norm2_sq(sub(runner_.pos(w, m), runner_.pos(w, T0_)), d_), lim)) {
        ++failures_[kSpeed];
        return false;
      }
  }
  for (int w = 0; w < 2; ++w)
    if (!eta_ones(w, m)) {
      ++failures_[kEtaOnes];
      return false;
    }
  ConeSpec spec;
  spec.d = d_;
  spec.bases = {runner_.pos(0, m)};
  if (runner_.pos(1, m) != runner_.pos(0, m)) spec.bases.push_back(runner_.pos(1, m));
  spec.b_inn = params_.b_inn;
  spec.b_out = params_.b_out;
  spec.s_inn = params_.s_inn;
  spec.s_out = params_.s_out;
  spec.h = std::min(r, shell_cap_);
  if (!good_shell(shell_medium_, spec, -m)) {
    ++failures_[kShell];
    return false;
  }
  if (ell_ >= 2) {
    const double radius = params_.s_out * static_cast<double>(prev) + params_.b_out;
    for (int w = 0; w < 2; ++w)
      if (!contained(w, T0_, T0_ + prev, runner_.pos(w, T0_), radius)) {
        ++failures_[kContainment];
        return false;
      }
  }
  rec = RegenRecord{};
  rec.index = count_ + 1;
  rec.T = m;
  rec.X = runner_.pos(0, m);
  rec.Xp = runner_.pos(1, m);
  rec.attempt = ell_;
  rec.eta_ones = rec.cone_point = rec.speed_ok = rec.shell_good = rec.containment_ok = true;
  const int edge = runner_.eta(0).m_relax() - 1;
  for (int w = 0; w < 2; ++w)
    for (const StepTrace& tr : traces_[w])
      for (const Decoration& dec : tr.deco) rec.proxy_hit = rec.proxy_hit || dec.ell >= edge;
  rec.failures = failures_;
  return true;
}

void RegenEngine::record_step() {
  const std::int64_t m = runner_.k();
  for (int w = 0; w < 2; ++w) traces_[w].push_back(trace_step(runner_.eta(w), runner_.pos(w, m), m, params_.R_loc));
}

std::optional<RegenRecord> RegenEngine::next() {
  while (runner_.k() < params_.horizon) {
    runner_.step();
    const std::int64_t m = runner_.k();
    record_step();
    const bool a = sigma_[0].push(m, traces_[0].back().D);
    const bool b = sigma_[1].push(m, traces_[1].back().D);
    if (!(a && b)) continue;
    const std::int64_t r = m - T0_;
    while (static_cast<std::size_t>(ell_ + 1) < t_.size() && t_[static_cast<std::size_t>(ell_)] <= r) {
      if (r >= t_[static_cast<std::size_t>(ell_ + 1)]) {
        ++failures_[kWindow];
        ++ell_;
        continue;
      }
      RegenRecord rec;
      if (attempt(m, rec)) {
        ++count_;
        failures_ = {};
        ell_ = 1;
        T0_ = m;
        for (int w = 0; w < 2; ++w) {
          traces_[w].erase(traces_[w].begin(), traces_[w].end() - 1);
          sigma_[w].restart(m, traces_[w].back().D);
        }
        k_first_ = m;
        return rec;
      }
      ++ell_;
    }
  }
  return std::nullopt;
}

RegenResult find_regenerations(RegenEngine& engine, int count) {
  RegenResult res;
  while (static_cast<int>(res.records.size()) < count) {
    auto rec = engine.next();
    if (!rec) {
      res.truncated = true;
      break;
    }
    res.records.push_back(*rec);
  }
  res.fallbacks = engine.runner().fallbacks();
  return res;
}

void write_regen_jsonl(std::ostream& out, const std::vector<RegenRecord>& recs, int d) {
  for (const RegenRecord& r : recs) {
    nlohmann::ordered_json j;
    j["i"] = r.index;
    j["T"] = r.T;
    j["X"] = std::vector<std::int64_t>(r.X.begin(), r.X.begin() + d);
    j["Xp"] = std::vector<std::int64_t>(r.Xp.begin(), r.Xp.begin() + d);
    j["attempt"] = r.attempt;
    j["flags"] = {{"eta_ones", r.eta_ones},     {"cone_point", r.cone_point}, {"speed_ok", r.speed_ok},
                  {"shell_good", r.shell_good}, {"containment_ok", r.containment_ok}, {"proxy_hit", r.proxy_hit}};
    j["failures"] = r.failures;
    out << j.dump() << '\n';
  }
}

void write_regen_csv(std::ostream& out, const std::vector<RegenRecord>& recs, int d, const Vec& x0, const Vec& x0p,
                     std::int64_t t0) {
  out << "i,T,dT,dX,dXp,attempt,eta_ones,cone_point,speed_ok,shell_good,containment_ok,proxy_hit\n";
  std::int64_t prevT = t0;
  Vec prevX = x0, prevXp = x0p;
  for (const RegenRecord& r : recs) {
    const double dx = euclid(sub(r.X, prevX), d);
    const double dxp = euclid(sub(r.Xp, prevXp), d);
    out << r.index << ',' << r.T << ',' << r.T - prevT << ',' << dx << ',' << dxp << ',' << r.attempt << ','
        << r.eta_ones << ',' << r.cone_point << ',' << r.speed_ok << ',' << r.shell_good << ',' << r.containment_ok
        << ',' << r.proxy_hit << '\n';
    prevT = r.T;
    prevX = r.X;
    prevXp = r.Xp;
  }
}

}  // namespace llab
