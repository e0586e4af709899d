#ifndef LINEAGELAB_STATS_VERIFY_HPP
#define LINEAGELAB_STATS_VERIFY_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <vector>

#include "coupling_lab.hpp"

namespace llab {

struct Interval {
  double lo = 0, hi = 0;
};

/// Kolmogorov distribution survival function P(K > x).
double kolmogorov_sf(double x);

struct KsResult {
  double distance = 0, p_value = 1;
};

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);
KsResult ks_uniform(std::vector<double> samples);
KsResult ks_normal(std::vector<double> samples, double mean, double sd);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct Chi2Result {
  double statistic = 0, p_value = 1;
  int dof = 0;
};

/// Pearson test; cells with expected count below `min_expected` are pooled into their neighbour.
Chi2Result chi2_gof(const std::vector<double>& observed, const std::vector<double>& expected, int fitted = 0,
                    double min_expected = 5.0);
/// Observed counts of nonnegative integers against a probability mass function.
Chi2Result chi2_counts(const std::vector<std::uint32_t>& samples, const std::function<double(std::uint32_t)>& pmf);

double normal_cdf(double x);
Interval wilson(int k, int n, double z = 1.959963984540054);
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);
double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);
double correlation(const std::vector<double>& a, const std::vector<double>& b);

/// Basic bootstrap interval 2*theta - quantiles, `resamples` draws from a fixed seed.
Interval basic_bootstrap(const std::vector<double>& data, const std::function<double(const std::vector<double>&)>& stat,
                         int resamples = 1000, std::uint64_t seed = 20240901, double level = 0.95);

/// Hill estimator of the tail index from the k = floor(frac n) largest samples.
double hill(std::vector<double> samples, double tail_fraction);

struct TailEstimate {
  double beta = 0;
  Interval ci;
  double rank_size_slope = 0;
  std::size_t k = 0;
  double threshold = 0;
  bool lighter_than_polynomial = false;
};

TailEstimate tail_exponent(const std::vector<double>& samples, double tail_fraction, int resamples = 1000,
                           std::uint64_t seed = 20240901);

/// Hitting probability of the outer sphere before the inner one for Brownian motion from radius r.
double f_d(int d, double r, double r1, double r2);

/// Across-environment variance of quenched means minus the mean within-environment variance over M.
double corrected_quenched_variance(const std::vector<std::vector<double>>& values);

struct QuenchedPoint {
  std::int64_t n = 0;
  double estimate = 0;
  Interval ci;
  double raw_variance = 0, correction = 0;
};

struct QuenchedBatch {
  std::uint64_t seed = 1;
  double p = 0.98;
  int m_relax = 64;
  KappaSpec spec;
  int environments = 200, walkers = 500;
  std::vector<std::int64_t> grid{100, 200, 400, 800, 1600};
  int resamples = 1000;
  std::int64_t box_half_width = -1;  // slab width; negative: chosen from the horizon
};

struct QuenchedResult {
  std::vector<QuenchedPoint> curve;
  std::vector<double> final_scaled;  // X_n / sqrt(n) at the largest grid point, first coordinate
  KsResult annealed;
  double annealed_mean = 0, annealed_sd = 0;
  double product_estimator = 0, squared_mean_estimator = 0, identity_se = 0;
  std::int64_t fallbacks = 0;
};

/// d=1 quenched CLT diagnostics for f(x) = tanh(x).
QuenchedResult quenched_variance_curve(const QuenchedBatch& batch, int workers = 1);

struct NormalityResult {
  std::vector<KsResult> per_coordinate;
  KsResult radius;  // Mahalanobis radius against chi-squared with d degrees of freedom
  std::vector<double> mean;
};

NormalityResult annealed_normality(const std::vector<std::vector<double>>& samples);

struct AnnulusResult {
  int replicas = 0, outer_first = 0, undecided = 0;
  double estimate = 0;
  Interval ci;
  double reference = 0;
};

/// P(distance reaches r2 before r1) for the independent pair along its regenerations.
AnnulusResult annulus_exit(const CouplingSetup& setup, double r, double r1, double r2, int replicas,
                           std::int64_t max_steps = 100000, int workers = 1);

struct BlackBox {
  std::int64_t start = 0, end = 0;  // [R_{i-1}, D_i)
  int type = 0;                     // 1..4; 0 when the start positions coincide, -1 when cut off by the path end
};

struct D1Decomp {
  std::map<std::int64_t, std::array<double, 5>> phi;  // signed distance -> phi1, phi2, phi11, phi22, phi12
  std::map<std::int64_t, int> visits;
  std::vector<BlackBox> boxes;
  std::int64_t R_n = 0;
};

/// Pairs of positions along joint regenerations, d=1.
struct PairPath {
  std::vector<std::int64_t> x, xp;
};

std::int64_t close_time(const PairPath& path, std::int64_t n, double a);
std::vector<BlackBox> black_boxes(const PairPath& path, std::int64_t n, double a, double b_prime);
D1Decomp d1_decomposition(const std::vector<PairPath>& paths, std::int64_t n, double a, double b_prime,
                          int min_visits = 30);
/// A^{(1)}_n from the estimated phi1 along one path (bins without an estimate count as 0).
double a1_process(const D1Decomp& dec, const PairPath& path, std::int64_t n);

struct D1Setup {
  CouplingSetup coupling;
  int replicas = 60;
  std::int64_t length = 1600;
  std::vector<std::int64_t> grid{100, 400, 1600};
  double a = 0.1, b_prime = 0.3;
  std::int64_t box_n = 100;  // thresholds n^a, n^b' used for W-types
};

/// Joint regeneration chains in one medium per replica, started together.
std::vector<PairPath> d1_paths(const D1Setup& setup, int workers = 1);

void write_curve_csv(std::ostream& out, const std::vector<QuenchedPoint>& curve);

}  // namespace llab

#endif
