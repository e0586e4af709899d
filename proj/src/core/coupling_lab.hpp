#ifndef LINEAGELAB_COUPLING_LAB_HPP
#define LINEAGELAB_COUPLING_LAB_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "regeneration.hpp"

namespace llab {

struct CouplingSetup {
  std::uint64_t seed = 1;
  double p = 0.98;
  int m_relax = 64;
  KappaSpec spec;
  RegenParams regen;
  bool same_media = false;  // control: both media read the same stream
};

/// Displacements of both walks and elapsed time up to the first regeneration.
struct Increment {
  Vec dX{}, dXp{};
  std::int64_t dT = 0;
  bool found = false;
  friend bool operator==(const Increment&, const Increment&) = default;
};

struct CouplingRecord {
  std::int64_t step = 0;
  double distance = 0;
  Increment joint, ind;
  bool uncoupled = false;
};

/// Step s uses media streams 2s+1 and 2s+2, their composite across the
/// perpendicular bisector of (x, xp), and walk streams 2s+1, 2s+2 shared by both pairs.
CouplingRecord coupled_step(const CouplingSetup& setup, std::int64_t step, const Vec& x, const Vec& xp);

std::vector<CouplingRecord> run_coupled_chain(const CouplingSetup& setup, const Vec& x0, const Vec& x0p,
                                              std::int64_t steps);

/// Regeneration increments of the independent pair alone.
Increment ind_step(const CouplingSetup& setup, std::int64_t step, const Vec& x, const Vec& xp);

struct FailurePoint {
  std::int64_t distance = 0;
  int trials = 0, failures = 0;
  double freq = 0, lo = 0, hi = 0;
};

/// First-step uncoupled frequency per start distance along the first axis.
/// Replica r uses the same derived seed at every distance.
std::vector<FailurePoint> failure_curve(const CouplingSetup& setup, const std::vector<std::int64_t>& distances,
                                        int replicas, int workers = 1);

/// Least-squares slope of log frequency against log distance; zero counts enter as 0.5 failures.
double failure_slope(const std::vector<FailurePoint>& curve);

int uncoupled_count(const std::vector<CouplingRecord>& records, std::size_t N);

void write_coupling_jsonl(std::ostream& out, const std::vector<CouplingRecord>& recs, int d);
void write_failure_csv(std::ostream& out, const std::vector<FailurePoint>& curve);

}  // namespace llab

#endif
