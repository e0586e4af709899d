#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <sstream>

namespace llab {

ConfigError::ConfigError(int line, const std::string& msg)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

IniConfig IniConfig::parse(const std::string& text, const Schema& schema) {
  IniConfig cfg;
  for (const auto& [sec, keys] : schema)
    for (const auto& [k, def] : keys) cfg.values_[sec][k] = Entry{def, 0, ""};
  std::map<std::string, std::map<std::string, int>> seen;
  std::istringstream in(text);
  std::string raw, section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(lineno, "malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (!schema.count(section)) throw ConfigError(lineno, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(lineno, "expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(lineno, "key '" + key + "' appears before any section");
    if (key.empty()) throw ConfigError(lineno, "empty key");
    if (!schema.at(section).count(key)) throw ConfigError(lineno, "unknown key '" + key + "' in section [" + section + "]");
    if (int prev = seen[section][key])
      throw ConfigError(lineno, "duplicate key '" + key + "' (first set on line " + std::to_string(prev) + ")");
    seen[section][key] = lineno;
    cfg.values_[section][key] = Entry{value, lineno, ""};
  }
  return cfg;
}

void IniConfig::apply_env(const std::function<const char*(const char*)>& getenv_fn) {
  for (auto& [sec, keys] : values_)
    for (auto& [k, e] : keys) {
      const std::string name = "LLAB_" + upper(sec) + "_" + upper(k);
      if (const char* v = getenv_fn(name.c_str())) {
        e.value = trim(v);
        e.env = name;
      }
    }
}

const IniConfig::Entry& IniConfig::entry(const std::string& section, const std::string& key) const {
  auto s = values_.find(section);
  if (s == values_.end() || !s->second.count(key)) throw ConfigError(0, "no such setting " + section + "." + key);
  return s->second.at(key);
}

void IniConfig::fail(const std::string& section, const std::string& key, const std::string& what) const {
  const Entry& e = entry(section, key);
  const std::string where = !e.env.empty() ? "environment variable " + e.env + ": " : "";
  throw ConfigError(e.env.empty() ? e.line : 0, where + section + "." + key + ": " + what);
}

std::string IniConfig::str(const std::string& section, const std::string& key) const { return entry(section, key).value; }

std::int64_t IniConfig::integer(const std::string& section, const std::string& key) const {
  const std::string& v = entry(section, key).value;
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) fail(section, key, "expected an integer, got '" + v + "'");
  return out;
}

double IniConfig::real(const std::string& section, const std::string& key) const {
  const std::string& v = entry(section, key).value;
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size()) fail(section, key, "expected a number, got '" + v + "'");
  return out;
}

std::vector<std::int64_t> IniConfig::int_list(const std::string& section, const std::string& key) const {
  std::vector<std::int64_t> out;
  std::istringstream in(entry(section, key).value);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = trim(tok);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
      fail(section, key, "expected a comma-separated integer list");
    out.push_back(v);
  }
  if (out.empty()) fail(section, key, "empty list");
  return out;
}

bool IniConfig::flag(const std::string& section, const std::string& key) const {
  const std::string v = entry(section, key).value;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(section, key, "expected true or false, got '" + v + "'");
}

std::string IniConfig::canonical() const {
  std::ostringstream out;
  for (const auto& [sec, keys] : values_)
    for (const auto& [k, e] : keys) out << sec << '.' << k << '=' << e.value << '\n';
  return out.str();
}

const IniConfig::Schema& experiment_schema() {
  static const IniConfig::Schema schema = {
      {"run", {{"seed", "20240901"}, {"output_dir", "out"}, {"workers", "1"}}},
      {"model", {{"model", "cp"}, {"d", "2"}, {"p", "0.98"}, {"m_relax", "64"}}},
      {"lbrw",
       {{"m", "2.0"},
        {"lambda0", "0.05"},
        {"lambda_neighbour", "0"},
        {"side", "64"},
        {"burn_in", "200"},
        {"keep", "20"},
        {"init", "14"}}},
      {"kernel", {{"R_loc", "1"}, {"R_ref", "1"}, {"R_kappa", "1"}}},
      {"cone",
       {{"b_inn", "1.95"},
        {"b_out", "1.97"},
        {"s_inn", "0.9"},
        {"s_out", "0.92"},
        {"s_max", "0.12"},
        {"shell_cap", "-1"},
        {"horizon", "100000"}}},
      {"simulate", {{"half_width", "8"}, {"steps", "32"}, {"path_length", "200"}}},
      {"regen", {{"count", "200"}, {"replicas", "1000"}, {"start_distance", "0"}, {"tail_fraction", "-1"}}},
      {"couple", {{"distances", "8,16,32,64"}, {"replicas", "2000"}, {"chain_steps", "0"}}},
      {"clt",
       {{"environments", "200"},
        {"walkers", "500"},
        {"grid", "100,400,1600"},
        {"resamples", "1000"},
        {"box_half_width", "-1"}}},
      {"annulus", {{"r", "20"}, {"r1", "10"}, {"r2", "40"}, {"replicas", "1000"}, {"max_steps", "100000"}}},
      {"d1",
       {{"replicas", "200"},
        {"length", "1600"},
        {"grid", "100,400,1600"},
        {"a", "0.1"},
        {"b_prime", "0.3"},
        {"box_n", "100"},
        {"min_visits", "50"}}},
      {"coarse",
       {{"L_s", "5"},
        {"L_t", "20"},
        {"R_eta", "1"},
        {"band_lo", "2"},
        {"band_hi", "40"},
        {"calibration_pairs", "8"},
        {"width", "25"},
        {"layers", "12"},
        {"trials", "20"},
        {"height_cap", "50"}}},
  };
  return schema;
}

CouplingSetup ExperimentConfig::coupling() const {
  CouplingSetup s;
  s.seed = seed;
  s.p = p;
  s.m_relax = m_relax;
  s.spec = kernel;
  s.regen = regen;
  return s;
}

CoarseSetup ExperimentConfig::coarse() const {
  CoarseSetup s;
  s.lbrw = lbrw;
  s.block = block;
  s.band = band;
  s.calibration_pairs = calibration_pairs;
  s.seed = seed;
  return s;
}

ExperimentConfig load_config(const std::string& text, const std::function<const char*(const char*)>& getenv_fn) {
  IniConfig ini = IniConfig::parse(text, experiment_schema());
  ini.apply_env(getenv_fn ? getenv_fn : [](const char* n) { return static_cast<const char*>(std::getenv(n)); });
  ExperimentConfig c;
  const auto check = [&](bool ok, const char* sec, const char* key, const std::string& what) {
    if (ok) return;
    const auto& e = ini.entry(sec, key);
    const std::string where = e.env.empty() ? "" : "environment variable " + e.env + ": ";
    throw ConfigError(e.env.empty() ? e.line : 0, where + sec + "." + key + ": " + what);
  };
  const auto count = [&](const char* sec, const char* key, std::int64_t lo) {
    const std::int64_t v = ini.integer(sec, key);
    check(v >= lo, sec, key, "must be at least " + std::to_string(lo));
    return v;
  };

  const std::int64_t seed = ini.integer("run", "seed");
  check(seed >= 0, "run", "seed", "must be nonnegative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.output_dir = ini.str("run", "output_dir");
  check(!c.output_dir.empty(), "run", "output_dir", "must not be empty");
  c.workers = static_cast<int>(count("run", "workers", 1));

  const std::string model = ini.str("model", "model");
  check(model == "cp" || model == "lbrw", "model", "model", "must be cp or lbrw");
  c.model = model == "cp" ? Model::cp : Model::lbrw;
  c.d = static_cast<int>(ini.integer("model", "d"));
  check(c.d >= 1 && c.d <= kMaxDim, "model", "d", "must be 1, 2 or 3");
  c.p = ini.real("model", "p");
  check(c.p >= 0 && c.p <= 1, "model", "p", "must lie in [0,1]");
  c.m_relax = static_cast<int>(ini.integer("model", "m_relax"));
  check(c.m_relax >= 2 && c.m_relax <= 126, "model", "m_relax", "must lie in [2,126]");

  c.lbrw.d = c.d;
  c.lbrw.m = ini.real("lbrw", "m");
  check(c.lbrw.m > 1, "lbrw", "m", "must exceed 1");
  c.lbrw.lambda0 = ini.real("lbrw", "lambda0");
  check(c.lbrw.lambda0 > 0, "lbrw", "lambda0", "must be positive");
  const double ln = ini.real("lbrw", "lambda_neighbour");
  check(ln >= 0, "lbrw", "lambda_neighbour", "must be nonnegative");
  c.lbrw.p_mig = LbrwParams::nearest_neighbour(c.d);
  if (ln > 0)
    for (const Vec& z : sup_ball(c.d, 1))
      if (sup_norm(z, c.d) == 1) c.lbrw.lambda.emplace_back(z, ln);
  c.lbrw_side = count("lbrw", "side", 3);
  c.lbrw_burn_in = count("lbrw", "burn_in", 0);
  c.lbrw_keep = count("lbrw", "keep", 0);
  c.lbrw_init = static_cast<std::uint32_t>(count("lbrw", "init", 0));
  for (const auto& w : c.lbrw.warnings()) c.warnings.push_back(w);

  c.kernel.kind = c.model == Model::cp ? KappaKind::backbone : KappaKind::lbrw;
  c.kernel.d = c.d;
  c.kernel.R_loc = static_cast<int>(count("kernel", "R_loc", 1));
  c.kernel.R_ref = static_cast<int>(count("kernel", "R_ref", 0));
  c.kernel.R_kappa = static_cast<int>(count("kernel", "R_kappa", 0));
  check(c.kernel.R_ref <= c.kernel.R_loc, "kernel", "R_ref", "must not exceed R_loc");
  check(c.kernel.R_kappa <= c.kernel.R_loc, "kernel", "R_kappa", "must not exceed R_loc");

  RegenParams& r = c.regen;
  r.b_inn = ini.real("cone", "b_inn");
  r.b_out = ini.real("cone", "b_out");
  r.s_inn = ini.real("cone", "s_inn");
  r.s_out = ini.real("cone", "s_out");
  r.s_max = ini.real("cone", "s_max");
  check(r.b_inn > 0, "cone", "b_inn", "must be positive");
  check(r.b_inn < r.b_out, "cone", "b_out", "b_inn < b_out is required");
  check(r.s_inn < r.s_out, "cone", "s_out", "s_inn < s_out is required");
  check(r.s_max >= 0, "cone", "s_max", "must be nonnegative");
  check(r.s_inn > r.s_max, "cone", "s_max", "s_inn > s_max is required");
  r.shell_cap = ini.integer("cone", "shell_cap");
  r.horizon = count("cone", "horizon", 1);
  r.R_loc = c.kernel.R_loc;

  c.sim_half_width = count("simulate", "half_width", 0);
  c.sim_steps = count("simulate", "steps", 1);
  c.sim_path_length = count("simulate", "path_length", 1);

  c.regen_count = static_cast<int>(count("regen", "count", 1));
  c.regen_replicas = static_cast<int>(count("regen", "replicas", 2));
  c.regen_start_distance = count("regen", "start_distance", 0);
  c.tail_fraction = ini.real("regen", "tail_fraction");
  check(c.tail_fraction < 0 || (c.tail_fraction > 0 && c.tail_fraction <= 0.2), "regen", "tail_fraction",
        "must be negative (automatic) or in (0, 0.2]");

  c.couple_distances = ini.int_list("couple", "distances");
  for (auto v : c.couple_distances) check(v >= 1, "couple", "distances", "distances must be positive");
  c.couple_replicas = static_cast<int>(count("couple", "replicas", 1));
  c.couple_chain_steps = count("couple", "chain_steps", 0);

  c.clt_environments = static_cast<int>(count("clt", "environments", 2));
  c.clt_walkers = static_cast<int>(count("clt", "walkers", 2));
  c.clt_grid = ini.int_list("clt", "grid");
  check(std::is_sorted(c.clt_grid.begin(), c.clt_grid.end()) && c.clt_grid.front() >= 1, "clt", "grid",
        "must be positive and increasing");
  c.clt_resamples = static_cast<int>(count("clt", "resamples", 1));
  c.clt_box_half_width = ini.integer("clt", "box_half_width");

  c.annulus_r = ini.real("annulus", "r");
  c.annulus_r1 = ini.real("annulus", "r1");
  c.annulus_r2 = ini.real("annulus", "r2");
  check(c.annulus_r1 > 0 && c.annulus_r1 < c.annulus_r && c.annulus_r < c.annulus_r2, "annulus", "r",
        "0 < r1 < r < r2 is required");
  c.annulus_replicas = static_cast<int>(count("annulus", "replicas", 1));
  c.annulus_max_steps = count("annulus", "max_steps", 1);

  c.d1_replicas = static_cast<int>(count("d1", "replicas", 1));
  c.d1_length = count("d1", "length", 1);
  c.d1_grid = ini.int_list("d1", "grid");
  c.d1_a = ini.real("d1", "a");
  c.d1_b_prime = ini.real("d1", "b_prime");
  check(c.d1_a > 0 && c.d1_a < c.d1_b_prime && c.d1_b_prime < 0.5, "d1", "b_prime", "0 < a < b_prime < 1/2 is required");
  c.d1_box_n = count("d1", "box_n", 1);
  c.d1_min_visits = static_cast<int>(count("d1", "min_visits", 1));

  c.block.L_s = count("coarse", "L_s", 1);
  c.block.L_t = count("coarse", "L_t", 1);
  c.block.R_eta = count("coarse", "R_eta", 0);
  const std::int64_t blo = count("coarse", "band_lo", 0), bhi = count("coarse", "band_hi", 0);
  check(blo <= bhi, "coarse", "band_hi", "band_lo <= band_hi is required");
  c.band = Band{static_cast<std::uint32_t>(blo), static_cast<std::uint32_t>(bhi)};
  c.calibration_pairs = static_cast<int>(count("coarse", "calibration_pairs", 0));
  c.coarse_width = count("coarse", "width", 1);
  c.coarse_layers = count("coarse", "layers", 1);
  c.contraction_trials = static_cast<int>(count("coarse", "trials", 1));
  c.height_cap = count("coarse", "height_cap", 0);
  if (c.block.L_t <= c.block.L_s) c.warnings.push_back("coarse L_t <= L_s");

  c.canonical = ini.canonical();
  return c;
}

}  // namespace llab
