#include "experiments.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "parallel.hpp"

namespace llab {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"simulate-cp", "simulate-lbrw", "regen",     "couple",
                                                 "clt",         "annulus",       "d1-decomp", "coarse"};
  return names;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return out.str();
}

std::string manifest_hash(const ExperimentConfig& cfg, const std::string& subcommand) {
  std::istringstream in(cfg.canonical);
  std::string line, kept;
  while (std::getline(in, line))
    if (line.rfind("run.output_dir=", 0) != 0 && line.rfind("run.workers=", 0) != 0) kept += line + '\n';
  return sha256_hex(std::string("lineagelab ") + LLAB_VERSION_STRING + '\n' + subcommand + '\n' + kept);
}

double tail_fraction_rule(const std::vector<double>& samples, double threshold) {
  if (samples.empty()) throw std::invalid_argument("tail_fraction_rule: no samples");
  const auto beyond = std::count_if(samples.begin(), samples.end(), [&](double v) { return v > threshold; });
  const double mass = static_cast<double>(beyond) / static_cast<double>(samples.size());
  const double floor = 2.0 / static_cast<double>(samples.size());
  return std::clamp(0.2 * mass, std::min(floor, 0.2), 0.2);
}

namespace {

struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;  // name, body without manifest line
  std::ostringstream& open(const std::string& name) {
    streams.emplace_back(name, std::make_unique<std::ostringstream>());
    streams.back().second->precision(10);
    return *streams.back().second;
  }
  std::vector<std::pair<std::string, std::unique_ptr<std::ostringstream>>> streams;
};

ojson config_echo(const std::string& canonical) {
  ojson j = ojson::object();
  std::istringstream in(canonical);
  std::string line;
  while (std::getline(in, line)) {
    const auto dot = line.find('.'), eq = line.find('=');
    j[line.substr(0, dot)][line.substr(dot + 1, eq - dot - 1)] = line.substr(eq + 1);
  }
  return j;
}

Vec axis_point(std::int64_t v) {
  Vec x{};
  x[0] = v;
  return x;
}

Interval boot_mean(const std::vector<double>& v, int resamples, std::uint64_t seed) {
  return basic_bootstrap(v, [](const std::vector<double>& s) { return mean(s); }, resamples, seed);
}

// ---------------------------------------------------------------- subcommands

void run_simulate_cp(const ExperimentConfig& c, Artifacts& art, RunOutcome& out) {
  const int d = c.d;
  const OmegaField omega(c.seed, medium_stream(1), c.p);
  EtaOracle eta(omega, d, c.m_relax);
  Vec lo{}, hi{};
  for (int i = 0; i < d; ++i) {
    lo[i] = -c.sim_half_width;
    hi[i] = c.sim_half_width;
  }
  dump_window_csv(art.open("window.csv"), omega, eta, d, lo, hi, -c.sim_steps, 0);
  PairSetup ps;
  ps.seed = c.seed;
  ps.p = c.p;
  ps.m_relax = c.m_relax;
  ps.spec = c.kernel;
  ps.medium1 = ps.medium2 = 1;
  const PairPaths paths = run_pair(ps, c.sim_path_length);
  write_path_csv(art.open("path1.csv"), paths.walk1, d);
  write_path_csv(art.open("path2.csv"), paths.walk2, d);
  write_spec_json(art.open("spec.json"), c.kernel);
  std::int64_t ones = 0, total = 0;
  for (std::int64_t n = -c.sim_steps; n <= 0; ++n)
    for (const Vec& z : sup_ball(d, c.sim_half_width)) {
      ones += eta.eta(Site{z, n});
      ++total;
    }
  out.summary["eta_density"] = static_cast<double>(ones) / static_cast<double>(total);
  out.summary["path_length"] = c.sim_path_length;
  out.summary["fallbacks"] = paths.fallbacks;
}

void run_simulate_lbrw(const ExperimentConfig& c, Artifacts& art, RunOutcome& out) {
  PopState init(c.d, c.lbrw_side, -c.lbrw_side / 2, 0);
  for (std::size_t i = 0; i < init.size(); ++i) init[i] = c.lbrw_init;
  const PopTrajectory traj = burn_in_surviving(c.lbrw, init, c.seed, 1, c.lbrw_burn_in, c.lbrw_keep, 16);
  dump_trajectory_jsonl(art.open("trajectory.jsonl"), traj);
  const std::int64_t retained = static_cast<std::int64_t>(traj.slices.size()) - 1;
  const std::int64_t horizon = std::min(c.sim_path_length, retained);
  if (horizon < c.sim_path_length) {
    out.truncated = true;
    out.summary["truncation"] = "lineage horizon cut to the retained window";
  }
  std::vector<Vec> path;
  if (!traj.extinct && horizon > 0)
    path = run_lineage(c.lbrw, traj, UniformField(c.seed, walk_stream(1)), Vec{}, horizon);
  write_path_csv(art.open("path.csv"), path, c.d);
  out.summary["final_population"] = traj.back().total();
  out.summary["extinct"] = traj.extinct;
  out.summary["restarts"] = traj.restarts;
  out.summary["lineage_steps"] = path.empty() ? 0 : static_cast<std::int64_t>(path.size()) - 1;
}

void run_regen(const ExperimentConfig& c, Artifacts& art, RunOutcome& out) {
  const int d = c.d;
  const Vec x0{}, x0p = axis_point(c.regen_start_distance);
  // chained regenerations in one medium
  {
    const OmegaField omega(c.seed, medium_stream(1), c.p);
    EtaOracle eta(omega, d, c.m_relax);
    PairRunner runner(eta, eta, c.kernel, UniformField(c.seed, walk_stream(1)), UniformField(c.seed, walk_stream(2)),
                      x0, x0p);
    RegenEngine engine(runner, omega, c.regen);
    const RegenResult res = find_regenerations(engine, c.regen_count);
    write_regen_jsonl(art.open("regen.jsonl"), res.records, d);
    write_regen_csv(art.open("regen.csv"), res.records, d, x0, x0p, 0);
    out.truncated = out.truncated || res.truncated;
    out.summary["chain_regenerations"] = res.records.size();
    out.summary["chain_truncated"] = res.truncated;
  }
  // first regeneration times over independent media
  const std::size_t R = static_cast<std::size_t>(c.regen_replicas);
  std::vector<RegenRecord> first(R);
  std::vector<std::uint8_t> found(R, 0);
  parallel_for(R, c.workers, [&](std::size_t r) {
    const std::uint64_t seed = replica_seed(c.seed, r);
    const OmegaField omega(seed, medium_stream(1), c.p);
    EtaOracle eta(omega, d, c.m_relax);
    PairRunner runner(eta, eta, c.kernel, UniformField(seed, walk_stream(1)), UniformField(seed, walk_stream(2)), x0,
                      x0p);
    RegenEngine engine(runner, omega, c.regen);
    if (auto rec = engine.next()) {
      first[r] = *rec;
      found[r] = 1;
    }
  });
  std::ostringstream& t1 = art.open("t1.csv");
  t1 << "replica,T1,dX,dXp,attempt,proxy_hit\n";
  std::vector<double> T;
  std::size_t missing = 0;
  for (std::size_t r = 0; r < R; ++r) {
    if (!found[r]) {
      ++missing;
      continue;
    }
    T.push_back(static_cast<double>(first[r].T));
    t1 << r << ',' << first[r].T << ',' << euclid(sub(first[r].X, x0), d) << ','
       << euclid(sub(first[r].Xp, x0p), d) << ',' << first[r].attempt << ',' << first[r].proxy_hit << '\n';
  }
  if (missing) out.truncated = true;
  out.summary["replicas"] = R;
  out.summary["replicas_without_regeneration"] = missing;
  const auto sched = schedule(c.regen.schedule_params(), 4);
  const double t2 = static_cast<double>(sched.size() > 2 ? sched[2] : 2);
  std::ostringstream& tail = art.open("tail.csv");
  tail << "tail_fraction,estimate,lo,hi,rank_size_slope,k,threshold,lighter_than_polynomial\n";
  if (T.size() >= 2 && *std::max_element(T.begin(), T.end()) > *std::min_element(T.begin(), T.end())) {
    const double frac = c.tail_fraction > 0 ? c.tail_fraction : tail_fraction_rule(T, t2);
    const TailEstimate te = tail_exponent(T, frac, 1000, 20240901);
    tail << frac << ',' << te.beta << ',' << te.ci.lo << ',' << te.ci.hi << ',' << te.rank_size_slope << ',' << te.k
         << ',' << te.threshold << ',' << te.lighter_than_polynomial << '\n';
    out.summary["tail_fraction"] = frac;
    out.summary["second_attempt_time"] = t2;
    out.summary["mass_beyond_second_attempt"] =
        static_cast<double>(std::count_if(T.begin(), T.end(), [&](double v) { return v > t2; })) /
        static_cast<double>(T.size());
    out.summary["beta"] = te.beta;
    out.summary["beta_ci"] = {te.ci.lo, te.ci.hi};
    out.summary["rank_size_slope"] = te.rank_size_slope;
    out.summary["lighter_than_polynomial"] = te.lighter_than_polynomial;
  }
  if (!T.empty()) {
    out.summary["T1_mean"] = mean(T);
    out.summary["T1_max"] = *std::max_element(T.begin(), T.end());
  }
}

void run_couple(const ExperimentConfig& c, Artifacts& art, RunOutcome& out) {
  const CouplingSetup s = c.coupling();
  const auto curve = failure_curve(s, c.couple_distances, c.couple_replicas, c.workers);
  write_failure_csv(art.open("failure.csv"), curve);
  bool monotone = true;
  for (std::size_t i = 1; i < curve.size(); ++i) monotone = monotone && curve[i].freq <= curve[i - 1].freq;
  out.summary["monotone_nonincreasing"] = monotone;
  if (curve.size() >= 2) out.summary["loglog_slope"] = failure_slope(curve);
  if (c.couple_chain_steps > 0) {
    const auto recs = run_coupled_chain(s, Vec{}, axis_point(c.couple_distances.front()), c.couple_chain_steps);
    write_coupling_jsonl(art.open("coupling.jsonl"), recs, c.d);
    int unc = 0;
    for (const auto& r : recs) unc += r.uncoupled;
    out.summary["chain_steps"] = recs.size();
    out.summary["chain_uncoupled"] = unc;
    if (static_cast<std::int64_t>(recs.size()) < c.couple_chain_steps) out.truncated = true;
  }
}

void run_clt(const ExperimentConfig& c, Artifacts& art, RunOutcome& out) {
  if (c.d != 1) throw ConfigError(0, "clt: model.d must be 1");
  QuenchedBatch b;
  b.seed = c.seed;
  b.p = c.p;
  b.m_relax = c.m_relax;
  b.spec = c.kernel;
  b.environments = c.clt_environments;
  b.walkers = c.clt_walkers;
  b.grid = c.clt_grid;
  b.resamples = c.clt_resamples;
  b.box_half_width = c.clt_box_half_width;
  const QuenchedResult q = quenched_variance_curve(b, c.workers);
  std::ostringstream& v = art.open("variance.csv");
  v << "# estimate = Var_env(mean_walkers f) - mean_env(s^2_walkers)/M, f(x) = tanh(x / sqrt n)\n";
  write_curve_csv(v, q.curve);
  out.summary["annealed_ks_distance"] = q.annealed.distance;
  out.summary["annealed_ks_p"] = q.annealed.p_value;
  out.summary["annealed_mean"] = q.annealed_mean;
  out.summary["annealed_sd"] = q.annealed_sd;
  out.summary["product_estimator"] = q.product_estimator;
  out.summary["squared_mean_estimator"] = q.squared_mean_estimator;
  out.summary["identity_se"] = q.identity_se;
  out.summary["fallbacks"] = q.fallbacks;
  if (q.curve.size() >= 2) {
    const auto& a = q.curve.front();
    const auto& z = q.curve.back();
    out.summary["variance_ratio_last_first"] = a.estimate != 0 ? z.estimate / a.estimate : 0.0;
    out.summary["cis_separated"] = z.ci.hi < a.ci.lo;
  }
}

void run_annulus(const ExperimentConfig& c, Artifacts& art, RunOutcome& out) {
  const AnnulusResult a = annulus_exit(c.coupling(), c.annulus_r, c.annulus_r1, c.annulus_r2, c.annulus_replicas,
                                       c.annulus_max_steps, c.workers);
  std::ostringstream& f = art.open("annulus.csv");
  f << "r,estimate,lo,hi,reference,replicas,undecided\n";
  f << c.annulus_r << ',' << a.estimate << ',' << a.ci.lo << ',' << a.ci.hi << ',' << a.reference << ','
    << a.replicas << ',' << a.undecided << '\n';
  if (a.undecided) out.truncated = true;
  out.summary["estimate"] = a.estimate;
  out.summary["reference"] = a.reference;
  out.summary["undecided"] = a.undecided;
}

void run_d1(const ExperimentConfig& c, Artifacts& art, RunOutcome& out) {
  if (c.d != 1) throw ConfigError(0, "d1-decomp: model.d must be 1");
  D1Setup s;
  s.coupling = c.coupling();
  s.replicas = c.d1_replicas;
  s.length = c.d1_length;
  s.grid = c.d1_grid;
  s.a = c.d1_a;
  s.b_prime = c.d1_b_prime;
  s.box_n = c.d1_box_n;
  const std::vector<PairPath> paths = d1_paths(s, c.workers);
  for (const auto& p : paths)
    if (static_cast<std::int64_t>(p.x.size()) < c.d1_length + 1) out.truncated = true;
  const D1Decomp dec = d1_decomposition(paths, c.d1_box_n, c.d1_a, c.d1_b_prime, c.d1_min_visits);

  std::ostringstream& phi = art.open("phi.csv");
  phi << "distance,visits,phi1,phi2,phi11,phi22,phi12\n";
  for (const auto& [g, n] : dec.visits) {
    phi << g << ',' << n;
    auto it = dec.phi.find(g);
    if (it != dec.phi.end())
      for (double v : it->second) phi << ',' << v;
    else
      phi << ",,,,,";
    phi << '\n';
  }

  std::array<int, 5> types{};
  int complete = 0;
  for (const BlackBox& b : dec.boxes)
    if (b.type >= 0) {
      ++types[static_cast<std::size_t>(b.type)];
      ++complete;
    }
  std::ostringstream& w = art.open("wtypes.csv");
  w << "type,count,estimate,lo,hi\n";
  for (int t = 0; t <= 4; ++t) {
    const Interval ci = wilson(types[static_cast<std::size_t>(t)], complete);
    w << t << ',' << types[static_cast<std::size_t>(t)] << ','
      << (complete ? static_cast<double>(types[static_cast<std::size_t>(t)]) / complete : 0.0) << ',' << ci.lo << ','
      << ci.hi << '\n';
  }
  const double p1 = complete ? static_cast<double>(types[1]) / complete : 0.0;
  const double p3 = complete ? static_cast<double>(types[3]) / complete : 0.0;
  const double se = complete ? std::sqrt((p1 + p3) / complete) : 0.0;
  out.summary["boxes_complete"] = complete;
  out.summary["P_W1"] = p1;
  out.summary["P_W3"] = p3;
  out.summary["pooled_se"] = se;

  std::ostringstream& rn = art.open("rn.csv");
  rn << "n,estimate,lo,hi\n";
  std::ostringstream& a1 = art.open("a1.csv");
  a1 << "n,estimate,lo,hi\n";
  std::vector<double> rn_curve, a1_curve;
  for (std::size_t g = 0; g < c.d1_grid.size(); ++g) {
    const std::int64_t n = c.d1_grid[g];
    std::vector<double> frac, a;
    for (const auto& p : paths) {
      frac.push_back(static_cast<double>(close_time(p, n, c.d1_a)) / static_cast<double>(n));
      a.push_back(a1_process(dec, p, n) / std::sqrt(static_cast<double>(n)));
    }
    const Interval ci = boot_mean(frac, 1000, 20240901 + g);
    rn << n << ',' << mean(frac) << ',' << ci.lo << ',' << ci.hi << '\n';
    const Interval ca = boot_mean(a, 1000, 20240911 + g);
    a1 << n << ',' << mean(a) << ',' << ca.lo << ',' << ca.hi << '\n';
    rn_curve.push_back(mean(frac));
    a1_curve.push_back(mean(a));
  }
  out.summary["Rn_over_n"] = rn_curve;
  out.summary["A1_over_sqrt_n"] = a1_curve;
}

void run_coarse(const ExperimentConfig& c, Artifacts& art, RunOutcome& out) {
  const CoarseSetup s = c.coarse();
  s.validate();
  const int d = c.d;
  const UniformField U(c.seed, medium_stream(7));
  const Noise noise = noise_from(U);
  const std::int64_t Ls = s.block.L_s, Lt = s.block.L_t;
  const CoarseField F = build_coarse_field(s, noise, Vec{}, c.coarse_width, 0, c.coarse_layers, c.workers);

  // full-window flow from the reference configuration, periodic with a wide margin
  const std::int64_t margin = 8 * Ls;
  PopState eta(d, c.coarse_width * Ls + 2 * margin, -margin, 0);
  for (std::size_t i = 0; i < eta.size(); ++i) eta[i] = s.band.mid();
  const std::size_t per = F.cells_per_layer();
  std::vector<std::uint8_t> good_eta(F.U.size(), 0);
  for (std::int64_t L = 0; L < c.coarse_layers; ++L) {
    for (std::size_t cidx = 0; cidx < per; ++cidx) {
      Vec centre{};
      const Vec cx = F.coords(cidx);
      for (int i = 0; i < d; ++i) centre[i] = Ls * cx[i];
      good_eta[static_cast<std::size_t>(L) * per + cidx] = eta_good(eta, centre, 2 * Ls, s.band);
    }
    for (std::int64_t k = 0; k < Lt; ++k) eta = step_population(s.lbrw, eta, U);
  }

  std::vector<BlockReport> rows(F.U.size());
  const std::int64_t K = k_eta(s.block);
  parallel_for(rows.size(), c.workers, [&](std::size_t i) {
    BlockReport& r = rows[i];
    r.cx = F.coords(i % per);
    r.cn = static_cast<std::int64_t>(i / per);
    r.good_U = F.U[i];
    r.good_eta = good_eta[i];
    bool left = false;
    const DCluster dc = determining_cluster(
        [&](const Vec& x, std::int64_t n) {
          if (!F.inside(x, n)) {
            left = true;
            return true;
          }
          return F.xi[F.index(x, n)] != 0;
        },
        r.cx, r.cn, K, d, c.height_cap);
    r.cluster_height = dc.height;
    r.cluster_partial = dc.partial || left;
    if (r.good_U) r.pass_fraction = verify_contraction(s, noise, r.cx, r.cn, c.contraction_trials, c.seed ^ 0x5eedULL);
  });
  write_block_csv(art.open("blocks.csv"), rows, d);

  int good = 0, violations = 0, heights_full = 0;
  double pass_sum = 0, pass_min = 1;
  std::vector<double> heights;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const bool G = rows[i].good_U && rows[i].good_eta;
    violations += F.xi[i] && !G;
    if (rows[i].good_U) {
      ++good;
      pass_sum += rows[i].pass_fraction;
      pass_min = std::min(pass_min, rows[i].pass_fraction);
    }
    if (!rows[i].cluster_partial) {
      heights.push_back(static_cast<double>(rows[i].cluster_height));
      ++heights_full;
    }
  }
  // same-layer correlation of the good-noise field by separation
  std::ostringstream& corr = art.open("correlation.csv");
  corr << "separation,estimate,lo,hi,pairs\n";
  for (std::int64_t sep = 1; sep <= std::min<std::int64_t>(10, c.coarse_width - 1); ++sep) {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < F.U.size(); ++i) {
      Vec y = F.coords(i % per);
      y[0] += sep;
      const std::int64_t n = static_cast<std::int64_t>(i / per);
      if (!F.inside(y, n)) continue;
      a.push_back(F.U[i]);
      b.push_back(F.U[F.index(y, n)]);
    }
    const bool flat = a.size() < 4 || variance(a) == 0 || variance(b) == 0;
    const double r = flat ? 0.0 : correlation(a, b);
    const double z = std::atanh(std::clamp(r, -0.999999, 0.999999));
    const double h = a.size() > 3 ? 1.959963984540054 / std::sqrt(static_cast<double>(a.size()) - 3) : 0.0;
    corr << sep << ',' << r << ',' << std::tanh(z - h) << ',' << std::tanh(z + h) << ',' << a.size() << '\n';
  }
  out.summary["blocks"] = rows.size();
  out.summary["k_eta"] = K;
  out.summary["good_U_fraction"] = static_cast<double>(good) / static_cast<double>(rows.size());
  out.summary["good_blocks"] = good;
  out.summary["pass_fraction_mean"] = good ? pass_sum / good : 0.0;
  out.summary["pass_fraction_min"] = good ? pass_min : 0.0;
  out.summary["domination_violations"] = violations;
  out.summary["cluster_heights_complete"] = heights_full;
  out.summary["cluster_height_mean"] = heights.empty() ? 0.0 : mean(heights);
  out.summary["cluster_height_max"] = heights.empty() ? 0.0 : *std::max_element(heights.begin(), heights.end());
  out.summary["predicates"] = "band and coupling surrogates";
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg, const std::string& sub) {
  if (std::find(subcommands().begin(), subcommands().end(), sub) == subcommands().end())
    throw std::invalid_argument("unknown subcommand '" + sub + "'");
  const bool lbrw_only = sub == "simulate-lbrw" || sub == "coarse";
  const bool cp_only = !lbrw_only;
  if (lbrw_only && cfg.model != Model::lbrw) throw ConfigError(0, sub + ": model.model must be lbrw");
  if (cp_only && cfg.model != Model::cp) throw ConfigError(0, sub + ": model.model must be cp");
  RunOutcome out;
  out.hash = manifest_hash(cfg, sub);
  out.summary = ojson::object();
  Artifacts art;
  if (sub == "simulate-cp") run_simulate_cp(cfg, art, out);
  else if (sub == "simulate-lbrw") run_simulate_lbrw(cfg, art, out);
  else if (sub == "regen") run_regen(cfg, art, out);
  else if (sub == "couple") run_couple(cfg, art, out);
  else if (sub == "clt") run_clt(cfg, art, out);
  else if (sub == "annulus") run_annulus(cfg, art, out);
  else if (sub == "d1-decomp") run_d1(cfg, art, out);
  else run_coarse(cfg, art, out);

  const fs::path dir = fs::path(cfg.output_dir) / sub;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  out.directory = dir.string();
  for (auto& [name, stream] : art.streams) {
    const fs::path path = dir / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    const bool jsonl = name.size() > 6 && name.substr(name.size() - 6) == ".jsonl";
    const bool json = !jsonl && name.size() > 5 && name.substr(name.size() - 5) == ".json";
    if (jsonl) f << "{\"manifest\":\"" << out.hash << "\"}\n" << stream->str();
    else if (json) {
      ojson j = ojson::parse(stream->str());
      ojson wrapped = ojson::object();
      wrapped["manifest"] = out.hash;
      wrapped["content"] = j;
      f << wrapped.dump(2) << '\n';
    } else
      f << "# manifest " << out.hash << '\n' << stream->str();
    out.artifacts.push_back(name);
  }
  ojson m = ojson::object();
  m["manifest"] = out.hash;
  m["version"] = LLAB_VERSION_STRING;
  m["subcommand"] = sub;
  m["config"] = config_echo(cfg.canonical);
  m["seeds"] = {{"base", cfg.seed},
                {"replica_rule", "mix64(seed ^ mix64(r + 0x9e3779b97f4a7c15))"},
                {"medium_streams", "1, 2 per replica; coupling step s uses 2s+1, 2s+2; coarse noise 7"},
                {"walk_streams", "0x80000000 | i"}};
  m["truncated"] = out.truncated;
  m["warnings"] = cfg.warnings;
  m["artifacts"] = out.artifacts;
  m["summary"] = out.summary;
  std::ofstream mf(dir / "manifest.json", std::ios::binary);
  if (!mf) throw std::runtime_error("cannot write manifest in " + dir.string());
  mf << m.dump(2) << '\n';
  return out;
}

std::vector<std::string> verify_run(const std::string& directory) {
  const fs::path dir(directory);
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw std::runtime_error("no manifest.json in " + directory);
  const ojson m = ojson::parse(mf);
  const std::string hash = m.at("manifest").get<std::string>();
  std::vector<std::string> bad;
  for (const auto& a : m.at("artifacts")) {
    const std::string name = a.get<std::string>();
    std::ifstream f(dir / name);
    std::string first;
    std::getline(f, first);
    if (first.find(hash) == std::string::npos) {
      // JSON artifacts carry the hash on their second line
      std::string second;
      std::getline(f, second);
      if (second.find(hash) == std::string::npos) bad.push_back(name);
    }
  }
  return bad;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void plotdata(const std::vector<std::string>& inputs, std::ostream& out) {
  std::vector<std::string> header;
  std::size_t xi = 0, ei = 0, li = 0, hi = 0;
  std::vector<std::string> rows;
  std::map<std::string, int> run_ids;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    std::ifstream f(inputs[k]);
    if (!f) throw std::runtime_error("cannot read " + inputs[k]);
    std::string line, run_id;
    std::vector<std::string> cols;
    while (std::getline(f, line)) {
      if (line.rfind("# manifest ", 0) == 0) {
        run_id = line.substr(11, 12);
        continue;
      }
      if (!line.empty() && line[0] == '#') continue;
      if (cols.empty()) {
        cols = split_csv(line);
        break;
      }
    }
    if (cols.empty()) continue;  // empty input contributes nothing
    if (run_id.empty()) run_id = "run" + std::to_string(k + 1);
    if (header.empty()) {
      header = cols;
      const auto find = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw SchemaError(inputs[k] + ": missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
      };
      xi = 0;
      ei = find("estimate");
      li = find("lo");
      hi = find("hi");
    } else {
      for (std::size_t i = 0; i < std::max(cols.size(), header.size()); ++i) {
        const std::string want = i < header.size() ? header[i] : "";
        const std::string got = i < cols.size() ? cols[i] : "";
        if (want != got)
          throw SchemaError(inputs[k] + ": column " + std::to_string(i + 1) + " is '" + got + "', expected '" + want +
                            "'");
      }
    }
    while (std::getline(f, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto cells = split_csv(line);
      if (cells.size() != header.size())
        throw SchemaError(inputs[k] + ": row has " + std::to_string(cells.size()) + " cells, header has " +
                          std::to_string(header.size()));
      rows.push_back(run_id + ',' + cells[xi] + ',' + cells[ei] + ',' + cells[li] + ',' + cells[hi]);
    }
  }
  out << "run_id," << (header.empty() ? std::string("x") : header[xi]) << ",estimate,lo,hi\n";
  for (const auto& r : rows) out << r << '\n';
}

}  // namespace llab
