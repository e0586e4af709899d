#ifndef LINEAGELAB_LBRW_ENV_HPP
#define LINEAGELAB_LBRW_ENV_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lattice.hpp"
#include "rng_field.hpp"

namespace llab {

/// Displacement-weight pairs. Order is lexicographic on the displacement.
using WeightMap = std::vector<std::pair<Vec, double>>;

struct LbrwParams {
  int d = 1;
  double m = 2.0;
  double lambda0 = 0.05;
  WeightMap lambda;  // competition weights lambda_{0,z} for z != 0
  WeightMap p_mig;   // migration kernel p_z

  void validate() const;
  /// Heuristic regime check; empty when m in (1,3) and the total competition is small.
  std::vector<std::string> warnings() const;
  std::int64_t migration_range() const;
  std::int64_t competition_range() const;

  /// Nearest-neighbour migration: uniform on the sup-norm ball of radius 1.
  static WeightMap nearest_neighbour(int d);
};

/// One time slice of the population on a periodic box [lo, lo + side)^d.
class PopState {
 public:
  PopState() = default;
  PopState(int d, std::int64_t side, std::int64_t lo, std::int64_t time = 0);

  int dim() const { return d_; }
  std::int64_t side() const { return side_; }
  std::int64_t lo() const { return lo_; }
  std::int64_t time = 0;

  std::size_t size() const { return counts_.size(); }
  /// Representative of x in the box.
  Vec wrap(const Vec& x) const;
  Vec coords(std::size_t idx) const;
  std::size_t index(const Vec& x) const;
  std::uint32_t at(const Vec& x) const { return counts_[index(x)]; }
  void set(const Vec& x, std::uint32_t c) { counts_[index(x)] = c; }
  std::uint32_t operator[](std::size_t idx) const { return counts_[idx]; }
  std::uint32_t& operator[](std::size_t idx) { return counts_[idx]; }

  std::uint64_t total() const;
  bool extinct() const { return total() == 0; }
  std::map<Vec, std::uint32_t> to_map() const;
  friend bool operator==(const PopState&, const PopState&) = default;

 private:
  int d_ = 1;
  std::int64_t side_ = 1;
  std::int64_t lo_ = 0;
  std::vector<std::uint32_t> counts_;
};

/// Retained slices, oldest first; slice times are consecutive.
struct PopTrajectory {
  std::vector<PopState> slices;
  bool extinct = false;
  int restarts = 0;

  const PopState& back() const { return slices.back(); }
  /// Slice with the given time, or throws WindowUnderflow.
  const PopState& at_time(std::int64_t t) const;
};

class WindowUnderflow : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

double mean_offspring(const LbrwParams& params, const PopState& zeta, const Vec& x);

/// Poisson(mean) quantile at u.
std::uint32_t poisson_inverse(double mean, double u);

/// Counts at time+1 drawn from U at (x, time+1), draw 0.
PopState step_population(const LbrwParams& params, const PopState& state, const UniformField& U);

/// Iterates the flow; keeps the last `keep` slices plus the final one.
PopTrajectory burn_in(const LbrwParams& params, const PopState& init, const UniformField& U, std::int64_t steps,
                      std::int64_t keep = 0);

/// Burn-in conditioned on survival: an extinct run is restarted on the next U stream.
PopTrajectory burn_in_surviving(const LbrwParams& params, const PopState& init, std::uint64_t seed,
                                std::uint32_t first_stream, std::int64_t steps, std::int64_t keep, int max_restarts);

/// y -> p_{yx} f(y; eta_prev) normalized, as displacements y - x; uniform on the
/// migration ball when every weight vanishes.
WeightMap ancestral_kernel(const LbrwParams& params, const PopState& eta_prev, const Vec& x);

/// JSON lines {"time":..,"sites":[{"x":[..],"count":..}]}, nonzero counts only.
void dump_trajectory_jsonl(std::ostream& out, const PopTrajectory& traj);

}  // namespace llab

#endif
