#include "contact_env.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace llab {

namespace {

std::vector<Vec> step_front(const Medium& omega, int d, const std::vector<Vec>& front, std::int64_t t,
                            const Site& target) {
  static thread_local std::vector<Vec> nb;
  nb = sup_ball(d, 1);
  std::vector<Vec> next;
  for (const Vec& z : front)
    for (const Vec& dz : nb) {
      const Vec y = add(z, dz);
      if (sup_norm(sub(target.x, y), d) > target.n - t) continue;
      next.push_back(y);
    }
  std::sort(next.begin(), next.end());
  next.erase(std::unique(next.begin(), next.end()), next.end());
  std::erase_if(next, [&](const Vec& y) { return !omega.open(Site{y, t}); });
  return next;
}

bool run_front(const Medium& omega, int d, std::vector<Vec> front, std::int64_t m, const Site& s) {
  std::erase_if(front, [&](const Vec& a) { return sup_norm(sub(s.x, a), d) > s.n - m || !omega.open(Site{a, m}); });
  for (std::int64_t t = m + 1; t <= s.n && !front.empty(); ++t) front = step_front(omega, d, front, t, s);
  return std::find(front.begin(), front.end(), s.x) != front.end();
}

}  // namespace

bool open_path_exists(const Medium& omega, int d, const Site& from, const Site& to) {
  if (from.n > to.n) throw std::invalid_argument("open_path_exists: from.n must not exceed to.n");
  return run_front(omega, d, {from.x}, from.n, to);
}

bool eta_finite(const Medium& omega, int d, const std::vector<Vec>& A, std::int64_t m, const Site& s) {
  if (s.n < m) throw std::invalid_argument("eta_finite: query time precedes the initial slice");
  std::vector<Vec> front(A.begin(), A.end());
  std::sort(front.begin(), front.end());
  front.erase(std::unique(front.begin(), front.end()), front.end());
  return run_front(omega, d, std::move(front), m, s);
}

EtaOracle::EtaOracle(const Medium& omega, int d, int m_relax, std::size_t cache_limit)
    : omega_(omega), d_(d), m_relax_(m_relax), cache_limit_(cache_limit), preds_(sup_ball_center_first(d, 1)) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("dimension must be 1, 2 or 3");
  if (m_relax < 1) throw std::invalid_argument("m_relax must be positive");
}

bool EtaOracle::at_least(const Site& s, int need) {
  if (need <= -1) return true;
  if (auto it = memo_.find(s); it != memo_.end()) {
    const Entry e = it->second;
    if (e.exact) return e.value >= need;
    if (e.value >= need) return true;
  }
  if (!omega_.open(s)) {
    memo_[s] = Entry{-1, true};
    return false;
  }
  if (need == 0) {
    Entry& e = memo_[s];
    e.value = std::max(e.value, 0);
    return true;
  }
  int best = -1;
  for (const Vec& dz : preds_) {
    const Site z{add(s.x, dz), s.n - 1};
    if (at_least(z, need - 1)) {
      Entry& e = memo_[s];
      e.value = std::max(e.value, need);
      return true;
    }
    best = std::max(best, memo_.find(z)->second.value);
  }
  memo_[s] = Entry{best + 1, true};
  return false;
}

int EtaOracle::ell(const Site& s) {
  if (memo_.size() > cache_limit_) memo_.clear();
  if (at_least(s, m_relax_)) return kEllInf;
  return memo_.find(s)->second.value;
}

SlabEta::SlabEta(const Medium& omega, int d, int m_relax, const Vec& lo, const Vec& hi, std::int64_t t0,
                 std::int64_t t1)
    : d_(d), m_relax_(m_relax), lo_(lo), hi_(hi), t0_(t0), t1_(t1), fallback_(omega, d, m_relax) {
  if (m_relax > 126) throw std::invalid_argument("SlabEta stores capped lengths in 8 bits; m_relax must be <= 126");
  if (t1 < t0) throw std::invalid_argument("SlabEta: empty time range");
  std::size_t level = 1;
  for (int i = 0; i < kMaxDim; ++i) {
    if (i < d) {
      if (hi[i] < lo[i]) throw std::invalid_argument("SlabEta: empty box");
      dlo_[i] = lo[i] - m_relax;
      ext_[i] = hi[i] - lo[i] + 2 * m_relax + 1;
    } else {
      dlo_[i] = 0;
      ext_[i] = 1;
    }
    level *= static_cast<std::size_t>(ext_[i]);
  }
  const std::int64_t levels = t1 - t0 + m_relax + 1;
  capped_.assign(level * static_cast<std::size_t>(levels), -1);

  std::vector<std::int8_t> tmp(level);
  const std::int64_t base_time = t0 - m_relax;
  for (std::int64_t L = 0; L < levels; ++L) {
    std::int8_t* cur = capped_.data() + level * static_cast<std::size_t>(L);
    const std::int64_t t = base_time + L;
    if (L > 0) {
      // separable sup-norm max filter of the previous level
      const std::int8_t* prev = cur - level;
      std::copy(prev, prev + level, tmp.begin());
      std::size_t stride = 1;
      for (int i = kMaxDim - 1; i >= 0; --i) {
        if (ext_[i] > 1) {
          std::vector<std::int8_t> src(tmp);
          const auto e = static_cast<std::size_t>(ext_[i]);
          for (std::size_t idx = 0; idx < level; ++idx) {
            const std::size_t c = (idx / stride) % e;
            std::int8_t v = src[idx];
            if (c > 0) v = std::max(v, src[idx - stride]);
            if (c + 1 < e) v = std::max(v, src[idx + stride]);
            tmp[idx] = v;
          }
        }
        stride *= static_cast<std::size_t>(ext_[i]);
      }
    }
    std::size_t idx = 0;
    Vec x{};
    for (x[0] = dlo_[0]; x[0] < dlo_[0] + ext_[0]; ++x[0])
      for (x[1] = dlo_[1]; x[1] < dlo_[1] + ext_[1]; ++x[1])
        for (x[2] = dlo_[2]; x[2] < dlo_[2] + ext_[2]; ++x[2], ++idx) {
          if (!omega.open(Site{x, t})) {
            cur[idx] = -1;
          } else if (L == 0) {
            cur[idx] = 0;
          } else {
            cur[idx] = static_cast<std::int8_t>(std::min<int>(m_relax, tmp[idx] + 1));
          }
        }
  }
}

bool SlabEta::covers(const Site& s) const {
  if (s.n < t0_ || s.n > t1_) return false;
  for (int i = 0; i < d_; ++i)
    if (s.x[i] < lo_[i] || s.x[i] > hi_[i]) return false;
  return true;
}

std::size_t SlabEta::index(const Vec& x, std::int64_t n) const {
  std::size_t level = static_cast<std::size_t>(ext_[0] * ext_[1] * ext_[2]);
  std::size_t idx = 0;
  for (int i = 0; i < kMaxDim; ++i) idx = idx * static_cast<std::size_t>(ext_[i]) + static_cast<std::size_t>(x[i] - dlo_[i]);
  return level * static_cast<std::size_t>(n - (t0_ - m_relax_)) + idx;
}

int SlabEta::ell(const Site& s) {
  if (!covers(s)) return fallback_.ell(s);
  const int v = capped_[index(s.x, s.n)];
  return v >= m_relax_ ? kEllInf : v;
}

bool Triangle::contains(const Site& s, int d) const {
  if (s.n > apex.n || s.n < apex.n - height) return false;
  return sup_norm(sub(s.x, apex.x), d) <= apex.n - s.n;
}

std::int64_t Triangle::member_count(int d) const {
  std::int64_t total = 0;
  for (std::int64_t k = 0; k <= height; ++k) {
    std::int64_t layer = 1;
    for (int i = 0; i < d; ++i) layer *= 2 * k + 1;
    total += layer;
  }
  return total;
}

std::vector<Site> Triangle::members(int d) const {
  std::vector<Site> out;
  for (std::int64_t k = 0; k <= height; ++k)
    for (const Vec& v : sup_ball(d, k)) out.push_back(Site{add(apex.x, v), apex.n - k});
  return out;
}

bool eta_stationary(EtaSource& oracle, const Site& s) { return oracle.eta(s); }

int ell(EtaSource& oracle, const Site& s) { return oracle.ell(s); }

std::optional<Triangle> determining_triangle(EtaSource& oracle, const Site& s) {
  const int l = oracle.ell(s);
  if (l == kEllInf) return std::nullopt;
  return Triangle{s, l + 1};
}

void dump_window_csv(std::ostream& out, const Medium& omega, EtaSource& eta, int d, const Vec& lo, const Vec& hi,
                     std::int64_t t0, std::int64_t t1) {
  for (int i = 0; i < d; ++i) out << 'x' << (i + 1) << ',';
  out << "n,omega,eta\n";
  for (std::int64_t n = t0; n <= t1; ++n) {
    Vec x = lo;
    while (true) {
      for (int i = 0; i < d; ++i) out << x[i] << ',';
      const Site s{x, n};
      out << n << ',' << (omega.open(s) ? 1 : 0) << ',' << (eta.eta(s) ? 1 : 0) << '\n';
      int i = d - 1;
      while (i >= 0 && x[i] == hi[i]) {
        x[i] = lo[i];
        --i;
      }
      if (i < 0) break;
      ++x[i];
    }
  }
}

double window_disagreement(const Medium& omega, int d, int m_relax, const std::vector<Site>& sites) {
  if (sites.empty()) return 0.0;
  EtaOracle a(omega, d, m_relax), b(omega, d, 2 * m_relax);
  std::size_t diff = 0;
  for (const Site& s : sites) diff += a.eta(s) != b.eta(s);
  return static_cast<double>(diff) / static_cast<double>(sites.size());
}

}  // namespace llab
