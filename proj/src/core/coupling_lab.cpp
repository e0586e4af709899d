#include "coupling_lab.hpp"

#include <json.hpp>

#include <cmath>
#include <ostream>

#include "parallel.hpp"
#include "stats_verify.hpp"

namespace llab {

namespace {

std::array<double, kMaxDim> midpoint(const Vec& a, const Vec& b) {
  return {0.5 * static_cast<double>(a[0] + b[0]), 0.5 * static_cast<double>(a[1] + b[1]),
          0.5 * static_cast<double>(a[2] + b[2])};
}

std::array<double, kMaxDim> direction(const Vec& a, const Vec& b) {
  if (a == b) return {1.0, 0.0, 0.0};
  const Vec v = sub(b, a);
  return {static_cast<double>(v[0]), static_cast<double>(v[1]), static_cast<double>(v[2])};
}

Increment first_regeneration(EtaSource& e1, EtaSource& e2, const Medium& shell, const CouplingSetup& s,
                             const UniformField& u1, const UniformField& u2, const Vec& x, const Vec& xp) {
  PairRunner runner(e1, e2, s.spec, u1, u2, x, xp);
  RegenEngine engine(runner, shell, s.regen);
  Increment inc;
  if (auto rec = engine.next()) {
    inc.found = true;
    inc.dT = rec->T;
    inc.dX = sub(rec->X, x);
    inc.dXp = sub(rec->Xp, xp);
  }
  return inc;
}

struct StepMedia {
  OmegaField w1, w2;
  CompositeMedium w3;
  StepMedia(const CouplingSetup& s, std::int64_t step, const Vec& x, const Vec& xp)
      : w1(s.seed, medium_stream(static_cast<std::uint32_t>(2 * step + 1)), s.p),
        w2(s.seed, medium_stream(static_cast<std::uint32_t>(s.same_media ? 2 * step + 1 : 2 * step + 2)), s.p),
        w3(w1, w2, midpoint(x, xp), direction(x, xp), s.spec.d) {}
};

UniformField walk_field(const CouplingSetup& s, std::int64_t step, int w) {
  return UniformField(s.seed, walk_stream(static_cast<std::uint32_t>(2 * step + 1 + w)));
}

}  // namespace

CouplingRecord coupled_step(const CouplingSetup& s, std::int64_t step, const Vec& x, const Vec& xp) {
  const StepMedia media(s, step, x, xp);
  const UniformField u1 = walk_field(s, step, 0), u2 = walk_field(s, step, 1);
  CouplingRecord rec;
  rec.step = step;
  rec.distance = euclid(sub(xp, x), s.spec.d);
  {
    EtaOracle e3(media.w3, s.spec.d, s.m_relax);
    rec.joint = first_regeneration(e3, e3, media.w3, s, u1, u2, x, xp);
  }
  {
    EtaOracle e1(media.w1, s.spec.d, s.m_relax), e2(media.w2, s.spec.d, s.m_relax);
    rec.ind = first_regeneration(e1, e2, media.w3, s, u1, u2, x, xp);
  }
  rec.uncoupled = !(rec.joint == rec.ind);
  return rec;
}

Increment ind_step(const CouplingSetup& s, std::int64_t step, const Vec& x, const Vec& xp) {
  const StepMedia media(s, step, x, xp);
  EtaOracle e1(media.w1, s.spec.d, s.m_relax), e2(media.w2, s.spec.d, s.m_relax);
  return first_regeneration(e1, e2, media.w3, s, walk_field(s, step, 0), walk_field(s, step, 1), x, xp);
}

std::vector<CouplingRecord> run_coupled_chain(const CouplingSetup& s, const Vec& x0, const Vec& x0p,
                                              std::int64_t steps) {
  std::vector<CouplingRecord> out;
  Vec x = x0, xp = x0p;
  for (std::int64_t st = 0; st < steps; ++st) {
    CouplingRecord rec = coupled_step(s, st, x, xp);
    out.push_back(rec);
    if (!rec.joint.found) break;
    x = add(x, rec.joint.dX);
    xp = add(xp, rec.joint.dXp);
  }
  return out;
}

std::vector<FailurePoint> failure_curve(const CouplingSetup& s, const std::vector<std::int64_t>& distances,
                                        int replicas, int workers) {
  std::vector<FailurePoint> out;
  for (std::int64_t dist : distances) {
    if (dist < 1) throw std::invalid_argument("failure_curve: distances must be at least 1");
    std::vector<std::uint8_t> fail(static_cast<std::size_t>(replicas), 0);
    parallel_for(fail.size(), workers, [&](std::size_t r) {
      CouplingSetup sr = s;
      sr.seed = replica_seed(s.seed, r);
      Vec xp{};
      xp[0] = dist;
      fail[r] = coupled_step(sr, 0, Vec{}, xp).uncoupled ? 1 : 0;
    });
    FailurePoint fp;
    fp.distance = dist;
    fp.trials = replicas;
    for (auto f : fail) fp.failures += f;
    fp.freq = replicas ? static_cast<double>(fp.failures) / replicas : 0.0;
    const Interval ci = wilson(fp.failures, fp.trials);
    fp.lo = ci.lo;
    fp.hi = ci.hi;
    out.push_back(fp);
  }
  return out;
}

double failure_slope(const std::vector<FailurePoint>& curve) {
  std::vector<double> lx, ly;
  for (const FailurePoint& f : curve) {
    lx.push_back(std::log(static_cast<double>(f.distance)));
    ly.push_back(std::log((f.failures > 0 ? f.failures : 0.5) / static_cast<double>(f.trials)));
  }
  return ols_slope(lx, ly);
}

int uncoupled_count(const std::vector<CouplingRecord>& records, std::size_t N) {
  if (records.size() < N) throw std::invalid_argument("uncoupled_count: fewer records than requested");
  int c = 0;
  for (std::size_t i = 0; i < N; ++i) c += records[i].uncoupled;
  return c;
}

void write_coupling_jsonl(std::ostream& out, const std::vector<CouplingRecord>& recs, int d) {
  const auto vec = [d](const Vec& v) { return std::vector<std::int64_t>(v.begin(), v.begin() + d); };
  const auto inc = [&](const Increment& i) {
    return nlohmann::ordered_json{{"dX", vec(i.dX)}, {"dXp", vec(i.dXp)}, {"dT", i.dT}, {"found", i.found}};
  };
  for (const CouplingRecord& r : recs) {
    nlohmann::ordered_json j;
    j["step"] = r.step;
    j["distance"] = r.distance;
    j["joint"] = inc(r.joint);
    j["ind"] = inc(r.ind);
    j["uncoupled"] = r.uncoupled;
    out << j.dump() << '\n';
  }
}

void write_failure_csv(std::ostream& out, const std::vector<FailurePoint>& curve) {
  out << "distance,trials,failures,estimate,lo,hi\n";
  for (const FailurePoint& f : curve)
    out << f.distance << ',' << f.trials << ',' << f.failures << ',' << f.freq << ',' << f.lo << ',' << f.hi << '\n';
}

}  // namespace llab
