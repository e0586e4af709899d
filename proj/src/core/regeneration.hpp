#ifndef LINEAGELAB_REGENERATION_HPP
#define LINEAGELAB_REGENERATION_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "cone_geometry.hpp"
#include "contact_env.hpp"
#include "lineage_walk.hpp"

namespace llab {

/// Tube site with a finite ell; its determining triangle has height ell + 1.
struct Decoration {
  Vec y{};
  int ell = -1;
};

/// Position and decorations of one walk at one walk time.
struct StepTrace {
  Vec pos{};
  std::vector<Decoration> deco;
  std::int64_t D = 0;
};

/// Tube-site decorations and D_k at walk time k.
StepTrace trace_step(EtaSource& eta, const Vec& pos, std::int64_t k, int R_loc);

std::int64_t d_n(EtaSource& eta, const std::vector<Vec>& path, std::int64_t n, int R_loc);

/// sigma times of the decorated path relative to walk time 0; advance one step at a time.
class SigmaTracker {
 public:
  /// Registers D at the next walk time; returns true if that time is a sigma time.
  bool push(std::int64_t k, std::int64_t D);
  void restart(std::int64_t k, std::int64_t D);

 private:
  bool started_ = false;
  std::int64_t runmax_ = 0;
};

/// Common sigma times of both walks up to `horizon` (time 0 excluded).
std::vector<std::int64_t> sigma_sim(EtaSource& eta1, EtaSource& eta2, const std::vector<Vec>& path1,
                                    const std::vector<Vec>& path2, std::int64_t horizon, int R_loc);

struct TubeSet {
  enum Kind { tube, dtube } kind = tube;
  std::vector<Site> sites;  // sorted, unique
};

/// tube_n and the union of determining triangles over it.
std::pair<TubeSet, TubeSet> decorated_tubes(EtaSource& eta, const std::vector<Vec>& path, std::int64_t n, int R_loc);

/// Sites with environment time in [-n, -m] lie in the cone of radius b + s (n + site.n) around `base`.
bool is_cone_time_point(const std::vector<Site>& sites, const Vec& base, double b, double s, int d, std::int64_t m,
                        std::int64_t n);

/// Same test on a compact trace: trace[j] is walk time k_first + j, checked for walk times in [lo, hi];
/// the cone base is at walk time hi.
bool cone_point_compact(const std::vector<StepTrace>& trace, std::int64_t k_first, std::int64_t lo, std::int64_t hi,
                        const Vec& base, double b, double s, int R_loc, int d);

struct RegenParams {
  double b_inn = 2.0, b_out = 2.5, s_inn = 0.9, s_out = 0.95, s_max = 0.1;
  std::int64_t shell_cap = -1;  // negative: m_relax
  std::int64_t horizon = 100000;
  int R_loc = 1;

  void validate() const;
  ScheduleParams schedule_params() const { return {s_max, b_inn, b_out, s_inn, s_out}; }
};

enum Check { kWindow = 0, kConePoint, kSpeed, kEtaOnes, kShell, kContainment, kNumChecks };

struct RegenRecord {
  int index = 0;
  std::int64_t T = 0;
  Vec X{}, Xp{};
  int attempt = 0;
  bool eta_ones = false, cone_point = false, speed_ok = false, shell_good = false, containment_ok = false;
  bool proxy_hit = false;
  std::array<int, kNumChecks> failures{};
};

struct RegenResult {
  std::vector<RegenRecord> records;
  bool truncated = false;
  std::int64_t fallbacks = 0;
};

/// Construction of simultaneous regeneration times for a pair of walks. The
/// shell medium is the one the double cone shell is tested in.
class RegenEngine {
 public:
  RegenEngine(PairRunner& runner, const Medium& shell_medium, const RegenParams& params);

  /// Next regeneration, or nullopt when the horizon is reached first.
  std::optional<RegenRecord> next();
  const std::vector<std::int64_t>& schedule() const { return t_; }
  PairRunner& runner() { return runner_; }

 private:
  void record_step();
  bool attempt(std::int64_t m, RegenRecord& rec);
  bool eta_ones(int w, std::int64_t m);
  bool contained(int w, std::int64_t lo, std::int64_t hi, const Vec& centre, double radius) const;
  const StepTrace& trace(int w, std::int64_t k) const { return traces_[w][static_cast<std::size_t>(k - k_first_)]; }

  PairRunner& runner_;
  const Medium& shell_medium_;
  RegenParams params_;
  int d_;
  std::int64_t shell_cap_;
  std::vector<std::int64_t> t_;
  std::vector<StepTrace> traces_[2];
  SigmaTracker sigma_[2];
  std::int64_t k_first_;
  std::int64_t T0_;
  int ell_ = 1;
  int count_ = 0;
  std::array<int, kNumChecks> failures_{};
  std::vector<Vec> ball_out_;
};

/// Runs the construction until `count` records or the horizon.
RegenResult find_regenerations(RegenEngine& engine, int count);

/// JSON line per record, and a summary CSV (i, T, dT, |dX|, attempt, flags).
void write_regen_jsonl(std::ostream& out, const std::vector<RegenRecord>& recs, int d);
void write_regen_csv(std::ostream& out, const std::vector<RegenRecord>& recs, int d, const Vec& x0, const Vec& x0p,
                     std::int64_t t0 = 0);

}  // namespace llab

#endif
