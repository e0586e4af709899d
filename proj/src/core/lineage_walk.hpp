#ifndef LINEAGELAB_LINEAGE_WALK_HPP
#define LINEAGELAB_LINEAGE_WALK_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "contact_env.hpp"
#include "lattice.hpp"
#include "lbrw_env.hpp"
#include "rng_field.hpp"

namespace llab {

enum class KappaKind { backbone, lbrw };

struct KappaSpec {
  KappaKind kind = KappaKind::backbone;
  int d = 2;
  int R_loc = 1, R_ref = 1, R_kappa = 1;
  WeightMap kappa_ref;  // empty means uniform on the R_ref sup-ball

  void validate() const;
  /// kappa_ref with the default filled in.
  WeightMap reference() const;
};

/// Displacement probabilities in lexicographic displacement order.
using Kernel = WeightMap;

/// kappa_ref renormalized onto {y : |y-x| <= R_ref, eta(y, -k-1) = 1}; uniform on the
/// R_kappa ball when that set carries no weight.
Kernel kappa_backbone(EtaSource& eta, const KappaSpec& spec, std::int64_t k, const Vec& x, bool* fallback = nullptr);

/// Ancestral kernel on the slice `traj.back().time - k - 1`.
Kernel kappa_lineage(const LbrwParams& params, const PopTrajectory& traj, std::int64_t k, const Vec& x);

struct WalkState {
  std::int64_t k = 0;
  Vec pos{};
  std::uint32_t stream = walk_stream(0);
};

/// Inverse transform with the uniform at (pos, -k), draw 0.
WalkState step_walk(const WalkState& state, const Kernel& kernel, const UniformField& U);

/// Total variation distance between a kernel and the reference kernel.
double tv_distance(const Kernel& a, const Kernel& b);

/// Two walks on the contact-process backbone, each reading its own eta source.
class PairRunner {
 public:
  PairRunner(EtaSource& eta1, EtaSource& eta2, const KappaSpec& spec, const UniformField& u1, const UniformField& u2,
             const Vec& x0, const Vec& x0p, std::int64_t k0 = 0);

  void step();
  void advance_to(std::int64_t k) {
    while (this->k() < k) step();
  }
  std::int64_t k() const { return k0_ + static_cast<std::int64_t>(paths_[0].size()) - 1; }
  std::int64_t k0() const { return k0_; }
  const Vec& pos(int w, std::int64_t k) const { return paths_[w][static_cast<std::size_t>(k - k0_)]; }
  const std::vector<Vec>& path(int w) const { return paths_[w]; }
  EtaSource& eta(int w) { return *eta_[w]; }
  std::int64_t fallbacks() const { return fallbacks_; }

 private:
  EtaSource* eta_[2];
  KappaSpec spec_;
  UniformField u_[2];
  std::int64_t k0_;
  std::vector<Vec> paths_[2];
  std::int64_t fallbacks_ = 0;
};

enum class PairMode { joint, ind };

struct PairSetup {
  std::uint64_t seed = 1;
  double p = 0.98;
  int m_relax = 64;
  KappaSpec spec;
  PairMode mode = PairMode::joint;
  std::uint32_t medium1 = 1, medium2 = 2;
  std::uint32_t walk1 = 1, walk2 = 2;
  Vec x0{}, x0p{};
};

struct PairPaths {
  std::vector<Vec> walk1, walk2;
  std::int64_t fallbacks = 0;
};

PairPaths run_pair(const PairSetup& setup, std::int64_t horizon);

/// Lineage of the logistic BRW on a retained trajectory.
std::vector<Vec> run_lineage(const LbrwParams& params, const PopTrajectory& traj, const UniformField& U, const Vec& x0,
                             std::int64_t horizon);

/// CSV with columns k, x1..xd.
void write_path_csv(std::ostream& out, const std::vector<Vec>& path, int d, std::int64_t k0 = 0);
/// JSON description of a kernel spec.
void write_spec_json(std::ostream& out, const KappaSpec& spec);

}  // namespace llab

#endif
