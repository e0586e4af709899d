#include "stats_verify.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "parallel.hpp"

namespace llab {

double kolmogorov_sf(double x) {
  if (x <= 0) return 1.0;
  constexpr double pi = 3.14159265358979323846;
  if (x < 1.18) {
    double s = 0;
    for (int k = 1; k <= 20; ++k) {
      const double t = (2 * k - 1) * pi / x;
      s += std::exp(-t * t / 8.0);
    }
    return std::clamp(1.0 - std::sqrt(2 * pi) / x * s, 0.0, 1.0);
  }
  double s = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

namespace {

double ks_p(double dist, double n) {
  const double rn = std::sqrt(n);
  return kolmogorov_sf((rn + 0.12 + 0.11 / rn) * dist);
}

}  // namespace

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_test: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double dmax = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    dmax = std::max({dmax, (i + 1) / n - f, f - i / n});
  }
  return {dmax, ks_p(dmax, n)};
}

KsResult ks_uniform(std::vector<double> samples) {
  return ks_test(std::move(samples), [](double x) { return std::clamp(x, 0.0, 1.0); });
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

KsResult ks_normal(std::vector<double> samples, double mu, double sd) {
  if (!(sd > 0)) throw std::invalid_argument("ks_normal: standard deviation must be positive");
  return ks_test(std::move(samples), [=](double x) { return normal_cdf((x - mu) / sd); });
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double dmax = 0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    dmax = std::max(dmax, std::abs(i / na - j / nb));
  }
  return {dmax, ks_p(dmax, na * nb / (na + nb))};
}

Chi2Result chi2_gof(const std::vector<double>& observed, const std::vector<double>& expected, int fitted,
                    double min_expected) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi2_gof: observed and expected differ in length");
  std::vector<double> o, e;
  double ao = 0, ae = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    ao += observed[i];
    ae += expected[i];
    if (ae >= min_expected) {
      o.push_back(ao);
      e.push_back(ae);
      ao = ae = 0;
    }
  }
  if (ae > 0 || ao > 0) {
    if (e.empty()) {
      o.push_back(ao);
      e.push_back(ae);
    } else {
      o.back() += ao;
      e.back() += ae;
    }
  }
  Chi2Result r;
  for (std::size_t i = 0; i < o.size(); ++i)
    if (e[i] > 0) r.statistic += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
  r.dof = static_cast<int>(o.size()) - 1 - fitted;
  r.p_value = r.dof > 0 ? boost::math::gamma_q(0.5 * r.dof, 0.5 * r.statistic) : 1.0;
  return r;
}

Chi2Result chi2_counts(const std::vector<std::uint32_t>& samples, const std::function<double(std::uint32_t)>& pmf) {
  if (samples.empty()) throw std::invalid_argument("chi2_counts: no samples");
  const std::uint32_t top = *std::max_element(samples.begin(), samples.end());
  std::vector<double> obs(top + 2, 0.0), exp(top + 2, 0.0);
  for (auto s : samples) obs[s] += 1;
  const double n = static_cast<double>(samples.size());
  double used = 0;
  for (std::uint32_t k = 0; k <= top; ++k) {
    exp[k] = n * pmf(k);
    used += pmf(k);
  }
  exp[top + 1] = n * std::max(0.0, 1.0 - used);
  return chi2_gof(obs, exp);
}

Interval wilson(int k, int n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double p = static_cast<double>(k) / n, z2 = z * z, nn = n;
  const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ols_slope: need two or more points");
  const double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("correlation: length mismatch");
  const double ma = mean(a), mb = mean(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

Interval basic_bootstrap(const std::vector<double>& data, const std::function<double(const std::vector<double>&)>& stat,
                         int resamples, std::uint64_t seed, double level) {
  if (data.empty()) throw std::invalid_argument("basic_bootstrap: no data");
  const double theta = stat(data);
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
  std::vector<double> reps;
  std::vector<double> buf(data.size());
  for (int r = 0; r < resamples; ++r) {
    for (auto& b : buf) b = data[pick(gen)];
    reps.push_back(stat(buf));
  }
  std::sort(reps.begin(), reps.end());
  const double alpha = 1.0 - level;
  const auto q = [&](double pr) {
    const double pos = pr * static_cast<double>(reps.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double f = pos - static_cast<double>(i);
    return i + 1 < reps.size() ? reps[i] * (1 - f) + reps[i + 1] * f : reps[i];
  };
  return {2 * theta - q(1 - alpha / 2), 2 * theta - q(alpha / 2)};
}

double hill(std::vector<double> samples, double tail_fraction) {
  if (samples.size() < 2) throw std::invalid_argument("hill: need at least two samples");
  if (!(tail_fraction > 0 && tail_fraction <= 0.2)) throw std::invalid_argument("hill: tail fraction must be in (0, 0.2]");
  std::sort(samples.begin(), samples.end(), std::greater<>());
  if (samples.front() == samples.back()) throw std::invalid_argument("hill: degenerate sample");
  auto k = static_cast<std::size_t>(std::floor(tail_fraction * static_cast<double>(samples.size())));
  k = std::clamp<std::size_t>(k, 1, samples.size() - 1);
  const double thr = samples[k];
  if (!(thr > 0)) throw std::invalid_argument("hill: threshold must be positive");
  double s = 0;
  for (std::size_t i = 0; i < k; ++i) s += std::log(samples[i] / thr);
  return s > 0 ? static_cast<double>(k) / s : std::numeric_limits<double>::infinity();
}

TailEstimate tail_exponent(const std::vector<double>& samples, double tail_fraction, int resamples,
                           std::uint64_t seed) {
  if (samples.size() < 2) throw std::invalid_argument("tail_exponent: need at least two samples");
  TailEstimate t;
  t.beta = hill(samples, tail_fraction);
  constexpr double cap = 1e9;
  t.ci = basic_bootstrap(
      samples,
      [&](const std::vector<double>& v) {
        if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) return cap;
        return std::min(cap, hill(v, tail_fraction));
      },
      resamples, seed);
  std::vector<double> s = samples;
  std::sort(s.begin(), s.end(), std::greater<>());
  t.k = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(tail_fraction * static_cast<double>(s.size()))), 1,
                                s.size() - 1);
  t.threshold = s[t.k];
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < t.k; ++i) {
    if (!(s[i] > 0)) break;
    lx.push_back(std::log(s[i]));
    ly.push_back(std::log((static_cast<double>(i) + 1) / static_cast<double>(s.size())));
  }
  t.rank_size_slope = lx.size() >= 2 && lx.front() != lx.back() ? ols_slope(lx, ly) : 0.0;
  const double quarter = std::max(tail_fraction / 4, 1.0 / static_cast<double>(s.size()));
  t.lighter_than_polynomial = hill(samples, quarter) > 1.5 * t.beta;
  return t;
}

double f_d(int d, double r, double r1, double r2) {
  if (!(r1 < r2) || r1 < 0 || (d > 1 && r1 == 0)) throw std::invalid_argument("f_d: need 0 < r1 < r2");
  if (r <= r1) return 0.0;
  if (r >= r2) return 1.0;
  if (d == 1) return (r - r1) / (r2 - r1);
  if (d == 2) return std::log(r / r1) / std::log(r2 / r1);
  const double e = 2.0 - d;
  return (std::pow(r1, e) - std::pow(r, e)) / (std::pow(r1, e) - std::pow(r2, e));
}

double corrected_quenched_variance(const std::vector<std::vector<double>>& values) {
  if (values.size() < 2) throw std::invalid_argument("corrected_quenched_variance: need two environments");
  std::vector<double> means;
  double within = 0;
  for (const auto& v : values) {
    if (v.size() < 2) throw std::invalid_argument("corrected_quenched_variance: need two walkers");
    means.push_back(mean(v));
    within += variance(v) / static_cast<double>(v.size());
  }
  return variance(means) - within / static_cast<double>(values.size());
}

QuenchedResult quenched_variance_curve(const QuenchedBatch& b, int workers) {
  if (b.spec.d != 1) throw std::invalid_argument("quenched_variance_curve: d=1 only");
  if (b.environments < 2 || b.walkers < 2) throw std::invalid_argument("quenched_variance_curve: need E, M >= 2");
  if (b.grid.empty()) throw std::invalid_argument("quenched_variance_curve: empty grid");
  const std::int64_t n_max = *std::max_element(b.grid.begin(), b.grid.end());
  const std::int64_t W =
      b.box_half_width >= 0 ? b.box_half_width : static_cast<std::int64_t>(8 * std::sqrt(double(n_max))) + 16;
  const std::size_t E = static_cast<std::size_t>(b.environments), M = static_cast<std::size_t>(b.walkers);
  const std::size_t G = b.grid.size();
  // values[g][e][w] = tanh(X_n / sqrt n)
  std::vector<std::vector<std::vector<double>>> values(G, std::vector<std::vector<double>>(E));
  std::vector<std::vector<double>> finals(E);
  std::vector<std::int64_t> fb(E, 0);
  parallel_for(E, workers, [&](std::size_t e) {
    const std::uint64_t seed = replica_seed(b.seed, e);
    const OmegaField omega(seed, medium_stream(1), b.p);
    SlabEta eta(omega, 1, b.m_relax, Vec{-W, 0, 0}, Vec{W, 0, 0}, -n_max - 1, 0);
    for (std::size_t g = 0; g < G; ++g) values[g][e].resize(M);
    finals[e].resize(M);
    for (std::size_t w = 0; w < M; ++w) {
      const UniformField U(seed, walk_stream(static_cast<std::uint32_t>(w + 1)));
      WalkState st{0, Vec{}, U.stream()};
      std::size_t g = 0;
      for (std::int64_t k = 0; k < n_max; ++k) {
        bool used_fallback = false;
        st = step_walk(st, kappa_backbone(eta, b.spec, k, st.pos, &used_fallback), U);
        fb[e] += used_fallback;
        while (g < G && b.grid[g] == st.k) {
          values[g][e][w] = std::tanh(static_cast<double>(st.pos[0]) / std::sqrt(static_cast<double>(st.k)));
          ++g;
        }
      }
      finals[e][w] = static_cast<double>(st.pos[0]) / std::sqrt(static_cast<double>(n_max));
    }
  });
  QuenchedResult res;
  for (auto f : fb) res.fallbacks += f;
  for (std::size_t g = 0; g < G; ++g) {
    QuenchedPoint pt;
    pt.n = b.grid[g];
    pt.estimate = corrected_quenched_variance(values[g]);
    std::vector<double> means;
    double within = 0;
    for (const auto& v : values[g]) {
      means.push_back(mean(v));
      within += variance(v) / static_cast<double>(v.size());
    }
    pt.raw_variance = variance(means);
    pt.correction = within / static_cast<double>(E);
    // resample environments by index
    std::vector<double> idx(E);
    std::iota(idx.begin(), idx.end(), 0.0);
    pt.ci = basic_bootstrap(
        idx,
        [&](const std::vector<double>& sel) {
          std::vector<std::vector<double>> pick;
          pick.reserve(sel.size());
          for (double i : sel) pick.push_back(values[g][static_cast<std::size_t>(i)]);
          return corrected_quenched_variance(pick);
        },
        b.resamples, 20240901 + g);
    res.curve.push_back(pt);
  }
  for (const auto& f : finals) res.final_scaled.insert(res.final_scaled.end(), f.begin(), f.end());
  res.annealed_mean = mean(res.final_scaled);
  res.annealed_sd = std::sqrt(variance(res.final_scaled));
  res.annealed = ks_normal(res.final_scaled, 0.0, res.annealed_sd);

  const auto& last = values[G - 1];
  std::vector<double> prods, sq;
  for (const auto& v : last) {
    for (std::size_t i = 0; i + 1 < v.size(); i += 2) prods.push_back(v[i] * v[i + 1]);
    sq.push_back(mean(v) * mean(v) - variance(v) / static_cast<double>(v.size()));
  }
  res.product_estimator = mean(prods);
  res.squared_mean_estimator = mean(sq);
  res.identity_se = std::sqrt(variance(prods) / static_cast<double>(prods.size()) +
                              variance(sq) / static_cast<double>(sq.size()));
  return res;
}

NormalityResult annealed_normality(const std::vector<std::vector<double>>& samples) {
  if (samples.size() < 2) throw std::invalid_argument("annealed_normality: need samples");
  const std::size_t d = samples.front().size();
  if (d < 1 || d > 3) throw std::invalid_argument("annealed_normality: dimension must be 1, 2 or 3");
  NormalityResult out;
  std::vector<std::vector<double>> cols(d);
  for (const auto& s : samples)
    for (std::size_t i = 0; i < d; ++i) cols[i].push_back(s[i]);
  std::vector<double> sd(d);
  for (std::size_t i = 0; i < d; ++i) {
    out.mean.push_back(mean(cols[i]));
    sd[i] = std::sqrt(variance(cols[i]));
    out.per_coordinate.push_back(ks_normal(cols[i], 0.0, sd[i]));
  }
  // covariance and its inverse for the Mahalanobis radius
  std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
  const double n = static_cast<double>(samples.size());
  for (const auto& s : samples)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) cov[i][j] += s[i] * s[j] / n;
  std::vector<std::vector<double>> inv(d, std::vector<double>(d, 0.0));
  if (d == 1) {
    inv[0][0] = 1.0 / cov[0][0];
  } else if (d == 2) {
    const double det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
    inv = {{cov[1][1] / det, -cov[0][1] / det}, {-cov[1][0] / det, cov[0][0] / det}};
  } else {
    const auto& c = cov;
    const double det = c[0][0] * (c[1][1] * c[2][2] - c[1][2] * c[2][1]) -
                       c[0][1] * (c[1][0] * c[2][2] - c[1][2] * c[2][0]) +
                       c[0][2] * (c[1][0] * c[2][1] - c[1][1] * c[2][0]);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        const std::size_t a = (j + 1) % 3, bb = (j + 2) % 3, r = (i + 1) % 3, s = (i + 2) % 3;
        inv[i][j] = (c[a][r] * c[bb][s] - c[a][s] * c[bb][r]) / det;
      }
  }
  std::vector<double> rad;
  for (const auto& s : samples) {
    double q = 0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) q += s[i] * inv[i][j] * s[j];
    rad.push_back(q);
  }
  const double k = static_cast<double>(d);
  out.radius = ks_test(rad, [k](double x) { return x <= 0 ? 0.0 : boost::math::gamma_p(k / 2, x / 2); });
  return out;
}

AnnulusResult annulus_exit(const CouplingSetup& setup, double r, double r1, double r2, int replicas,
                           std::int64_t max_steps, int workers) {
  if (!(r1 < r && r < r2)) throw std::invalid_argument("annulus_exit: need r1 < r < r2");
  const int d = setup.spec.d;
  std::vector<int> outcome(static_cast<std::size_t>(replicas), 0);  // 1 outer, -1 inner, 0 undecided
  parallel_for(outcome.size(), workers, [&](std::size_t i) {
    CouplingSetup s = setup;
    s.seed = replica_seed(setup.seed, i);
    Vec x{}, xp{};
    xp[0] = static_cast<std::int64_t>(std::llround(r));
    for (std::int64_t step = 0; step < max_steps; ++step) {
      const Increment inc = ind_step(s, step, x, xp);
      if (!inc.found) return;
      x = add(x, inc.dX);
      xp = add(xp, inc.dXp);
      const double dist = euclid(sub(xp, x), d);
      if (dist >= r2) {
        outcome[i] = 1;
        return;
      }
      if (dist <= r1) {
        outcome[i] = -1;
        return;
      }
    }
  });
  AnnulusResult res;
  res.replicas = replicas;
  int decided = 0;
  for (int o : outcome) {
    res.outer_first += o == 1;
    res.undecided += o == 0;
    decided += o != 0;
  }
  res.estimate = decided ? static_cast<double>(res.outer_first) / decided : 0.0;
  res.ci = wilson(res.outer_first, decided);
  res.reference = f_d(d, r, r1, r2);
  return res;
}

std::int64_t close_time(const PairPath& path, std::int64_t n, double a) {
  const double thr = std::pow(static_cast<double>(n), a);
  std::int64_t c = 0;
  for (std::int64_t j = 0; j <= n && j < static_cast<std::int64_t>(path.x.size()); ++j)
    c += std::abs(static_cast<double>(path.x[static_cast<std::size_t>(j)] - path.xp[static_cast<std::size_t>(j)])) <= thr;
  return c;
}

std::vector<BlackBox> black_boxes(const PairPath& path, std::int64_t n, double a, double b_prime) {
  const double lo = std::pow(static_cast<double>(n), a), hi = std::pow(static_cast<double>(n), b_prime);
  const auto len = static_cast<std::int64_t>(path.x.size());
  const auto gap = [&](std::int64_t j) {
    return path.x[static_cast<std::size_t>(j)] - path.xp[static_cast<std::size_t>(j)];
  };
  std::vector<BlackBox> out;
  std::int64_t R = 0;
  while (R < len) {
    std::int64_t D = R + 1;
    while (D < len && std::abs(static_cast<double>(gap(D))) < hi) ++D;
    BlackBox box{R, D, 0};
    if (D >= len) {
      box.end = len;
      box.type = -1;  // incomplete
      out.push_back(box);
      break;
    }
    const std::int64_t g0 = gap(R), g1 = gap(D);
    if (g0 > 0) box.type = g1 < 0 ? 1 : 2;
    else if (g0 < 0) box.type = g1 > 0 ? 3 : 4;
    out.push_back(box);
    std::int64_t next = D + 1;
    while (next < len && std::abs(static_cast<double>(gap(next))) > lo) ++next;
    R = next;
  }
  return out;
}

D1Decomp d1_decomposition(const std::vector<PairPath>& paths, std::int64_t n, double a, double b_prime,
                          int min_visits) {
  struct Acc {
    double n = 0, s1 = 0, s2 = 0, s11 = 0, s22 = 0, s12 = 0;
  };
  std::map<std::int64_t, Acc> acc;
  D1Decomp out;
  for (const PairPath& p : paths) {
    if (p.x.size() != p.xp.size()) throw std::invalid_argument("d1_decomposition: path length mismatch");
    for (std::size_t j = 0; j + 1 < p.x.size(); ++j) {
      Acc& c = acc[p.x[j] - p.xp[j]];
      const double dx = static_cast<double>(p.x[j + 1] - p.x[j]), dxp = static_cast<double>(p.xp[j + 1] - p.xp[j]);
      c.n += 1;
      c.s1 += dx;
      c.s2 += dxp;
      c.s11 += dx * dx;
      c.s22 += dxp * dxp;
      c.s12 += dx * dxp;
    }
    auto boxes = black_boxes(p, n, a, b_prime);
    out.boxes.insert(out.boxes.end(), boxes.begin(), boxes.end());
    out.R_n += close_time(p, n, a);
  }
  for (const auto& [g, c] : acc) {
    out.visits[g] = static_cast<int>(c.n);
    if (c.n < min_visits) continue;
    const double m1 = c.s1 / c.n, m2 = c.s2 / c.n;
    out.phi[g] = {m1, m2, c.s11 / c.n - m1 * m1, c.s22 / c.n - m2 * m2, c.s12 / c.n - m1 * m2};
  }
  return out;
}

double a1_process(const D1Decomp& dec, const PairPath& path, std::int64_t n) {
  double s = 0;
  for (std::int64_t j = 0; j < n && j < static_cast<std::int64_t>(path.x.size()); ++j) {
    auto it = dec.phi.find(path.x[static_cast<std::size_t>(j)] - path.xp[static_cast<std::size_t>(j)]);
    if (it != dec.phi.end()) s += it->second[0];
  }
  return s;
}

std::vector<PairPath> d1_paths(const D1Setup& setup, int workers) {
  const CouplingSetup& cs = setup.coupling;
  if (cs.spec.d != 1) throw std::invalid_argument("d1_paths: d=1 only");
  std::vector<PairPath> out(static_cast<std::size_t>(setup.replicas));
  parallel_for(out.size(), workers, [&](std::size_t r) {
    const std::uint64_t seed = replica_seed(cs.seed, r);
    const OmegaField omega(seed, medium_stream(1), cs.p);
    EtaOracle eta(omega, 1, cs.m_relax);
    PairRunner runner(eta, eta, cs.spec, UniformField(seed, walk_stream(1)), UniformField(seed, walk_stream(2)), Vec{},
                      Vec{});
    RegenEngine engine(runner, omega, cs.regen);
    PairPath& p = out[r];
    p.x.push_back(0);
    p.xp.push_back(0);
    for (std::int64_t i = 0; i < setup.length; ++i) {
      auto rec = engine.next();
      if (!rec) break;
      p.x.push_back(rec->X[0]);
      p.xp.push_back(rec->Xp[0]);
    }
  });
  return out;
}

void write_curve_csv(std::ostream& out, const std::vector<QuenchedPoint>& curve) {
  out << "n,estimate,lo,hi,raw_variance,correction\n";
  for (const QuenchedPoint& p : curve)
    out << p.n << ',' << p.estimate << ',' << p.ci.lo << ',' << p.ci.hi << ',' << p.raw_variance << ','
        << p.correction << '\n';
}

}  // namespace llab
