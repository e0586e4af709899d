#ifndef LINEAGELAB_CONTACT_ENV_HPP
#define LINEAGELAB_CONTACT_ENV_HPP

#include <absl/container/flat_hash_map.h>

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "lattice.hpp"
#include "rng_field.hpp"

namespace llab {

/// Symbolic value of ell when the backward open path survives the relaxation window.
inline constexpr int kEllInf = std::numeric_limits<int>::max();

/// Paths step by at most 1 in sup-norm per unit of time; every site on a path,
/// including both endpoints, must be open.
bool open_path_exists(const Medium& omega, int d, const Site& from, const Site& to);

/// 1{A x {m} -> s}, computed by the forward recursion of the contact process.
bool eta_finite(const Medium& omega, int d, const std::vector<Vec>& A, std::int64_t m, const Site& s);

/// Windowed stationary contact process: eta(s) = 1 iff some open backward path
/// from s has length m_relax, i.e. ell(s) >= m_relax.
class EtaSource {
 public:
  virtual ~EtaSource() = default;
  /// -1 if closed, kEllInf if the backward path survives m_relax steps, else the exact length.
  virtual int ell(const Site& s) = 0;
  bool eta(const Site& s) { return ell(s) == kEllInf; }
  virtual int m_relax() const = 0;
  virtual int dim() const = 0;
};

/// Lazy depth-first evaluator with a memo of lower bounds and exact values.
class EtaOracle final : public EtaSource {
 public:
  EtaOracle(const Medium& omega, int d, int m_relax = 64, std::size_t cache_limit = std::size_t{1} << 22);
  int ell(const Site& s) override;
  int m_relax() const override { return m_relax_; }
  int dim() const override { return d_; }
  const Medium& medium() const { return omega_; }
  std::size_t cache_size() const { return memo_.size(); }

 private:
  struct Entry {
    int value = -1;
    bool exact = false;
  };
  bool at_least(const Site& s, int need);

  const Medium& omega_;
  int d_;
  int m_relax_;
  std::size_t cache_limit_;
  std::vector<Vec> preds_;
  absl::flat_hash_map<Site, Entry> memo_;
};

/// Whole-slab dynamic programming over a box; queries outside the box fall back to a lazy oracle.
class SlabEta final : public EtaSource {
 public:
  /// Exact values for lo <= x <= hi (componentwise, first d coordinates) and t0 <= n <= t1.
  SlabEta(const Medium& omega, int d, int m_relax, const Vec& lo, const Vec& hi, std::int64_t t0, std::int64_t t1);
  int ell(const Site& s) override;
  int m_relax() const override { return m_relax_; }
  int dim() const override { return d_; }
  bool covers(const Site& s) const;

 private:
  std::size_t index(const Vec& x, std::int64_t n) const;

  int d_;
  int m_relax_;
  Vec lo_{}, hi_{}, dlo_{}, ext_{};
  std::int64_t t0_, t1_;
  std::vector<std::int8_t> capped_;
  EtaOracle fallback_;
};

/// Determining triangle {(y,m): |y-x| <= n-m, n-ell-1 <= m <= n}.
struct Triangle {
  Site apex;
  int height = 0;  // ell(apex) + 1
  bool contains(const Site& s, int d) const;
  std::int64_t member_count(int d) const;
  std::vector<Site> members(int d) const;
};

bool eta_stationary(EtaSource& oracle, const Site& s);
int ell(EtaSource& oracle, const Site& s);
std::optional<Triangle> determining_triangle(EtaSource& oracle, const Site& s);

/// CSV with columns x1..xd, n, omega, eta over a space-time window.
void dump_window_csv(std::ostream& out, const Medium& omega, EtaSource& eta, int d, const Vec& lo, const Vec& hi,
                     std::int64_t t0, std::int64_t t1);

/// Fraction of sites in the window where the windowed eta differs between m_relax and 2*m_relax.
double window_disagreement(const Medium& omega, int d, int m_relax, const std::vector<Site>& sites);

}  // namespace llab

#endif
