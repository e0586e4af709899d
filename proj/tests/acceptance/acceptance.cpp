// Acceptance checks. Each criterion prints one PASS/FAIL line; exit status 1 on FAIL.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "coarse_grain.hpp"
#include "experiments.hpp"
#include "regeneration.hpp"

using namespace llab;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string g(double v) { return fmt("%.4g", v); }

struct Context {
  fs::path configs, out;
};

ExperimentConfig load(const Context& ctx, const std::string& name) {
  std::ifstream f(ctx.configs / name);
  if (!f) throw std::runtime_error("cannot read " + (ctx.configs / name).string());
  std::ostringstream s;
  s << f.rdbuf();
  ExperimentConfig c = load_config(s.str());
  c.output_dir = (ctx.out / fs::path(name).stem()).string();
  return c;
}

// ---------------------------------------------------------------- 1

double dist(const Vec& z, const Vec& b) { return std::hypot(double(z[0] - b[0]), double(z[1] - b[1])); }

// plain re-implementation of the membership predicates
bool ref_cone(const Vec& base, double b, double s, std::int64_t h, const Vec& z, std::int64_t n) {
  if (n < 0 || (h >= 0 && n > h)) return false;
  const double r = b + s * double(n);
  return r >= 0 && dist(z, base) <= r + 1e-12;
}

bool ref_shell(const ConeSpec& c, const Vec& base, const Vec& z, std::int64_t n) {
  if (n <= 0 || (c.h >= 0 && n > c.h)) return false;
  const double r = dist(z, base);
  return r >= c.b_inn + c.s_inn * double(n) - 1e-12 && r <= c.b_out + c.s_out * double(n) + 1e-12;
}

bool ref_double_shell(const ConeSpec& c, const Vec& z, std::int64_t n) {
  bool shell = false, inner = false;
  for (const Vec& b : c.bases) {
    shell = shell || ref_shell(c, b, z, n);
    inner = inner || ref_cone(b, c.b_inn, c.s_inn, c.h, z, n);
  }
  return shell && !inner;
}

bool ref_middle(const ConeSpec& c, const Vec& z, std::int64_t n) {
  const double r = 0.5 * (double(n) * (c.s_out + c.s_inn) + c.b_out + c.b_inn);
  bool near = false;
  for (const Vec& b : c.bases) {
    if (dist(z, b) < r - 1e-12) return false;
    near = near || dist(z, b) <= r + 4.0 + 1e-12;
  }
  return near;
}

struct Enum {
  const ConeSpec& spec;
  std::int64_t half, slices;
  long long crossing = 0, missed = 0, disagree = 0;
  std::vector<Site> path;

  bool in_window(const Vec& z, std::int64_t n) const {
    return std::abs(z[0]) <= half && std::abs(z[1]) <= half && n >= 0 && n < slices;
  }
  bool strictly_inner(const Vec& z, std::int64_t n) const {
    if (spec.h >= 0 && n > spec.h) return false;
    for (const Vec& b : spec.bases)
      if (dist(z, b) < spec.b_inn + spec.s_inn * double(n) - 1e-12) return true;
    return false;
  }
  bool outside_outer(const Vec& z, std::int64_t n) const {
    for (const Vec& b : spec.bases)
      if (ref_cone(b, spec.b_out, spec.s_out, spec.h, z, n)) return false;
    return true;
  }
  void finish() {
    ++crossing;
    bool hit = false;
    for (const Site& s : path) hit = hit || in_middle_tube(spec, s.x, s.n);
    missed += !hit;
    disagree += !crosses_shell(spec, path);
  }
  void extend() {
    const Site last = path.back();
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const Vec z{last.x[0] + dx, last.x[1] + dy, 0};
        const std::int64_t n = last.n + 1;
        if (!in_window(z, n)) continue;
        path.push_back(Site{z, n});
        if (strictly_inner(z, n)) finish();
        else if (ref_double_shell(spec, z, n)) extend();
        path.pop_back();
      }
  }
  void run() {
    for (std::int64_t n = 0; n < slices; ++n)
      for (std::int64_t x = -half; x <= half; ++x)
        for (std::int64_t y = -half; y <= half; ++y) {
          const Vec z{x, y, 0};
          if (!outside_outer(z, n)) continue;
          path.assign(1, Site{z, n});
          extend();
        }
  }
};

Verdict criterion1(const Context&) {
  struct Case {
    std::int64_t half, slices;
    std::vector<Vec> bases;
    double b_inn, b_out, s_inn, s_out;
    std::int64_t h;
  };
  const std::vector<Case> cases{
      {2, 4, {Vec{}}, 0.5, 1.2, 0.3, 0.5, -1},
      {3, 6, {Vec{}}, 0.5, 2.0, 0.2, 0.4, -1},
      {4, 8, {Vec{}}, 0.8, 2.5, 0.25, 0.5, -1},
      {4, 8, {Vec{}}, 0.5, 3.5, 0.1, 0.3, 6},
      {4, 8, {Vec{-2, 0, 0}, Vec{2, 0, 0}}, 0.5, 1.5, 0.2, 0.4, -1},
      {4, 8, {Vec{-1, -1, 0}, Vec{2, 1, 0}}, 0.3, 2.0, 0.15, 0.35, -1},
  };
  long long crossing = 0, missed = 0, disagree = 0;
  for (const Case& k : cases) {
    ConeSpec s;
    s.d = 2;
    s.bases = k.bases;
    s.b_inn = k.b_inn;
    s.b_out = k.b_out;
    s.s_inn = k.s_inn;
    s.s_out = k.s_out;
    s.h = k.h;
    Enum e{s, k.half, k.slices};
    e.run();
    crossing += e.crossing;
    missed += e.missed;
    disagree += e.disagree;
  }

  // membership on random sites and random specs
  std::mt19937_64 rng(20240901);
  std::uniform_real_distribution<double> ur(0.0, 1.0);
  int mismatches = 0;
  const int sites = 10000;
  for (int i = 0; i < sites; ++i) {
    ConeSpec s;
    s.d = 2;
    s.bases = {Vec{}};
    if (i % 2) s.bases.push_back(Vec{static_cast<std::int64_t>(rng() % 21) - 10, static_cast<std::int64_t>(rng() % 21) - 10, 0});
    s.b_inn = 0.5 + 3 * ur(rng);
    s.b_out = s.b_inn + 0.1 + 4 * ur(rng);
    s.s_inn = 0.05 + 0.5 * ur(rng);
    s.s_out = s.s_inn + 0.05 + 0.5 * ur(rng);
    s.h = (i % 3 == 0) ? -1 : static_cast<std::int64_t>(rng() % 30);
    const Vec z{static_cast<std::int64_t>(rng() % 41) - 20, static_cast<std::int64_t>(rng() % 41) - 20, 0};
    const std::int64_t n = static_cast<std::int64_t>(rng() % 32) - 1;
    bool ok = in_inner_cone(s, z, n) == (ref_cone(s.bases[0], s.b_inn, s.s_inn, s.h, z, n) ||
                                         (s.bases.size() > 1 && ref_cone(s.bases[1], s.b_inn, s.s_inn, s.h, z, n)));
    ok = ok && in_outer_cone(s, z, n) == (ref_cone(s.bases[0], s.b_out, s.s_out, s.h, z, n) ||
                                          (s.bases.size() > 1 && ref_cone(s.bases[1], s.b_out, s.s_out, s.h, z, n)));
    ok = ok && in_shell(s, 0, z, n) == ref_shell(s, s.bases[0], z, n);
    ok = ok && in_double_shell(s, z, n) == ref_double_shell(s, z, n);
    if (n >= 0) ok = ok && in_middle_tube(s, z, n) == ref_middle(s, z, n);
    mismatches += !ok;
  }
  Verdict v;
  v.pass = crossing > 0 && missed == 0 && disagree == 0 && mismatches == 0;
  v.detail = std::to_string(crossing) + " crossing paths, " + std::to_string(missed) + " miss the middle tube, " +
             std::to_string(disagree) + " predicate disagreements; membership mismatches " +
             std::to_string(mismatches) + "/" + std::to_string(sites);
  return v;
}

// ---------------------------------------------------------------- 2

Verdict criterion2(const Context&) {
  std::mt19937_64 rng(7);
  int agree = 0, zeros = 0;
  const int instances = 100;
  for (int inst = 0; inst < instances; ++inst) {
    const int d = 1 + inst % 2;
    const double p = 0.6 + 0.35 * std::uniform_real_distribution<double>(0, 1)(rng);
    const std::uint64_t seed = rng();
    const OmegaField omega(seed, medium_stream(1), p);
    EtaOracle eta(omega, d, 24);
    KappaSpec ks;
    ks.d = d;
    PairRunner r(eta, eta, ks, UniformField(seed, walk_stream(1)), UniformField(seed, walk_stream(2)), Vec{}, Vec{});
    const std::int64_t n = 5 + static_cast<std::int64_t>(rng() % 30);
    r.advance_to(n);
    auto [tube, dtube] = decorated_tubes(eta, r.path(0), n, 1);
    const auto known = [&](const Site& s) {
      return std::binary_search(tube.sites.begin(), tube.sites.end(), s) ||
             std::binary_search(dtube.sites.begin(), dtube.sites.end(), s);
    };
    const FunctionMedium restricted([&](const Site& s) { return known(s) ? omega.open(s) : true; });
    EtaOracle re(restricted, d, 24);
    bool ok = true;
    for (const Site& s : tube.sites) {
      const bool e = eta.eta(s);
      zeros += !e;
      ok = ok && re.eta(s) == e;
    }
    agree += ok;
  }
  return {agree == instances, std::to_string(agree) + "/" + std::to_string(instances) +
                                  " instances agree on the tube (" + std::to_string(zeros) + " zeros in tubes)"};
}

// ---------------------------------------------------------------- 3

double poisson_pmf(double mu, std::uint32_t k) {
  if (mu == 0) return k == 0 ? 1.0 : 0.0;
  return std::exp(-mu + k * std::log(mu) - std::lgamma(k + 1.0));
}

Verdict criterion3(const Context&) {
  struct Config {
    double m, lambda0;
    std::vector<std::pair<std::int64_t, std::uint32_t>> occupied;
    std::int64_t target;
  };
  const std::vector<Config> configs{
      {1.5, 1.0, {{-1, 1}}, 0},                    // small mean
      {2.0, 1.0, {{-1, 1}, {0, 1}, {1, 1}}, 0},    // mean 1
      {2.0, 0.05, {{-1, 12}, {0, 30}, {2, 5}}, 1}, // large mean
  };
  const int seeds = 40000;
  Verdict v{true, ""};
  int idx = 0;
  for (const Config& c : configs) {
    LbrwParams p;
    p.d = 1;
    p.m = c.m;
    p.lambda0 = c.lambda0;
    p.p_mig = LbrwParams::nearest_neighbour(1);
    PopState z(1, 15, -7);
    for (auto [x, k] : c.occupied) z.set(Vec{x, 0, 0}, k);
    double mu = 0;
    for (const auto& [step, w] : p.p_mig) mu += w * mean_offspring(p, z, sub(Vec{c.target, 0, 0}, step));
    std::vector<std::uint32_t> counts;
    for (int s = 0; s < seeds; ++s)
      counts.push_back(step_population(p, z, UniformField(1000003ULL * idx + s, medium_stream(1))).at(Vec{c.target, 0, 0}));
    const Chi2Result r = chi2_counts(counts, [&](std::uint32_t k) { return poisson_pmf(mu, k); });
    v.pass = v.pass && r.p_value > 0.01;
    v.detail += (idx ? "; " : "") + std::string("mean ") + g(mu) + " p=" + g(r.p_value);
    ++idx;
  }
  return v;
}

// ---------------------------------------------------------------- 4

Verdict criterion4(const Context& ctx) {
  const ConstantMedium open(true);
  EtaOracle eta(open, 2, 64);
  KappaSpec ks;
  ks.d = 2;
  PairRunner runner(eta, eta, ks, UniformField(1, walk_stream(1)), UniformField(1, walk_stream(2)), Vec{}, Vec{});
  ExperimentConfig c = load(ctx, "accept_regen.ini");
  RegenEngine engine(runner, open, c.regen);
  const auto first = engine.next();
  const bool trivial = first && first->T == 1;

  const RunOutcome o = run_experiment(c, "regen");
  const auto& s = o.summary;
  if (!s.contains("beta")) return {false, "no tail estimate produced"};
  const double beta = s["beta"], lo = s["beta_ci"][0], hi = s["beta_ci"][1];
  const int missing = s["replicas_without_regeneration"];
  const int reps = s["replicas"];
  Verdict v;
  v.pass = trivial && reps >= 10000 && beta > 2 && lo > 1;
  v.detail = std::string("open medium T1=") + (first ? std::to_string(first->T) : "none") + "; beta " + g(beta) +
             " CI [" + g(lo) + ", " + g(hi) + "] from " + std::to_string(reps - missing) + " T1 samples, tail fraction " +
             g(s["tail_fraction"].get<double>());
  return v;
}

// ---------------------------------------------------------------- 5

Verdict criterion5(const Context& ctx) {
  const ExperimentConfig c = load(ctx, "accept_couple.ini");
  const RunOutcome o = run_experiment(c, "couple");
  const bool mono = o.summary["monotone_nonincreasing"];
  const double slope = o.summary["loglog_slope"];
  std::ifstream f(fs::path(o.directory) / "failure.csv");
  std::string line, freqs;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'd') continue;
    std::stringstream ss(line);
    std::string dist, trials, fails;
    std::getline(ss, dist, ',');
    std::getline(ss, trials, ',');
    std::getline(ss, fails, ',');
    freqs += (freqs.empty() ? "" : " ") + dist + ":" + fails + "/" + trials;
  }
  return {mono && slope <= -1.0, "failures " + freqs + "; monotone " + (mono ? "yes" : "no") + ", slope " + g(slope)};
}

// ---------------------------------------------------------------- 6

Verdict criterion6(const Context& ctx) {
  const ExperimentConfig c = load(ctx, "accept_annulus.ini");
  const RunOutcome o = run_experiment(c, "annulus");
  const double est = o.summary["estimate"], ref = o.summary["reference"];
  const int und = o.summary["undecided"];
  return {std::abs(est - ref) <= 0.1, "estimate " + g(est) + " vs reference " + g(ref) + " (tolerance 0.1), " +
                                          std::to_string(und) + " undecided"};
}

// ---------------------------------------------------------------- 7

Verdict criterion7(const Context& ctx) {
  const ExperimentConfig c = load(ctx, "accept_clt.ini");
  const RunOutcome o = run_experiment(c, "clt");
  const auto& s = o.summary;
  const double ratio = s["variance_ratio_last_first"], ks = s["annealed_ks_distance"];
  const bool sep = s["cis_separated"];
  Verdict v;
  v.pass = ratio < 0.5 && sep && ks < 0.05;
  v.detail = "variance ratio " + g(ratio) + ", CIs separated " + (sep ? "yes" : "no") + ", annealed KS " + g(ks);
  std::ifstream f(fs::path(o.directory) / "variance.csv");
  std::string line;
  while (std::getline(f, line))
    if (!line.empty() && std::isdigit(static_cast<unsigned char>(line[0]))) v.detail += "; [" + line + "]";
  return v;
}

// ---------------------------------------------------------------- 8

Verdict criterion8(const Context& ctx) {
  const ExperimentConfig c = load(ctx, "accept_d1.ini");
  const RunOutcome o = run_experiment(c, "d1-decomp");
  const auto& s = o.summary;
  const int boxes = s["boxes_complete"];
  const double p1 = s["P_W1"], p3 = s["P_W3"], se = s["pooled_se"];
  const std::vector<double> rn = s["Rn_over_n"];
  bool decreasing = rn.size() >= 2;
  for (std::size_t i = 1; i < rn.size(); ++i) decreasing = decreasing && rn[i] < rn[i - 1];
  Verdict v;
  v.pass = boxes >= 1000 && std::abs(p1 - p3) < 3 * se && decreasing;
  v.detail = std::to_string(boxes) + " boxes, |P(W=1)-P(W=3)| = " + g(std::abs(p1 - p3)) + " vs 3 SE " + g(3 * se) +
             "; R_n/n";
  for (double r : rn) v.detail += " " + g(r);
  return v;
}

// ---------------------------------------------------------------- 9

Verdict criterion9(const Context& ctx) {
  int bad = 0;
  for (std::int64_t L = 1; L <= 12; ++L)
    for (std::int64_t x = -10000; x <= 10000; ++x) bad += cg_pi(x, L) * L + cg_rho(x, L) != x;
  int bad_k = 0;
  for (std::int64_t R = 0; R <= 4; ++R)
    for (std::int64_t Ls = 1; Ls <= 12; ++Ls)
      for (std::int64_t Lt = 1; Lt <= 40; ++Lt) {
        const std::int64_t want = R * ((Lt + Ls - 1) / Ls + 1);
        bad_k += k_eta(BlockSpec{Ls, Lt, R}) != want;
      }
  const ExperimentConfig c = load(ctx, "accept_coarse.ini");
  const RunOutcome o = run_experiment(c, "coarse");
  const auto& s = o.summary;
  const int good = s["good_blocks"];
  const double pass = s["pass_fraction_mean"], pmin = s["pass_fraction_min"];
  Verdict v;
  v.pass = bad == 0 && bad_k == 0 && good >= 200 && c.contraction_trials >= 20 && pass >= 0.99;
  v.detail = "identity failures " + std::to_string(bad) + ", K formula failures " + std::to_string(bad_k) + "; " +
             std::to_string(good) + " good blocks x " + std::to_string(c.contraction_trials) + " pairs, pass " +
             g(pass) + " (min " + g(pmin) + "), good fraction " + g(s["good_U_fraction"].get<double>());
  return v;
}

// ---------------------------------------------------------------- 10

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Verdict criterion10(const Context& ctx) {
  const std::vector<std::pair<std::string, std::string>> runs{
      {"smoke_d2.ini", "simulate-cp"}, {"smoke_d2.ini", "regen"},     {"smoke_d2.ini", "couple"},
      {"smoke_d2.ini", "annulus"},     {"smoke_d1.ini", "clt"},       {"smoke_d1.ini", "d1-decomp"},
      {"smoke_lbrw.ini", "simulate-lbrw"}, {"smoke_lbrw.ini", "coarse"},
  };
  int identical = 0, files = 0;
  std::string differing;
  for (const auto& [cfg, sub] : runs) {
    ExperimentConfig c = load(ctx, cfg);
    c.output_dir = (ctx.out / "replay_a").string();
    const RunOutcome a = run_experiment(c, sub);
    c.output_dir = (ctx.out / "replay_b").string();
    const RunOutcome b = run_experiment(c, sub);
    bool same = a.hash == b.hash && a.artifacts == b.artifacts;
    std::vector<std::string> names = a.artifacts;
    names.push_back("manifest.json");
    for (const auto& n : names) {
      ++files;
      same = same && slurp(fs::path(a.directory) / n) == slurp(fs::path(b.directory) / n);
    }
    identical += same;
    if (!same) differing += " " + sub;
  }
  return {identical == static_cast<int>(runs.size()),
          std::to_string(identical) + "/" + std::to_string(runs.size()) + " subcommands byte-identical over " +
              std::to_string(files) + " files" + (differing.empty() ? "" : "; differ:" + differing)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lineagelab acceptance checks"};
  int which = 0;
  std::string configs = "configs", out = "acceptance_out";
  app.add_option("--criterion", which, "criterion number, 1-10")->required()->check(CLI::Range(1, 10));
  app.add_option("--configs", configs, "directory with the experiment configurations");
  app.add_option("--out", out, "scratch output directory");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Verdict(const Context&)>> table{
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9, criterion10};
  const Context ctx{configs, fs::path(out) / ("criterion" + std::to_string(which))};
  fs::remove_all(ctx.out);
  fs::create_directories(ctx.out);
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = table[static_cast<std::size_t>(which - 1)](ctx);
  } catch (const std::exception& e) {
    v = {false, std::string("error: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "criterion " << which << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << "  ["
            << fmt("%.1f", secs) << " s]" << std::endl;
  return v.pass ? 0 : 1;
}
