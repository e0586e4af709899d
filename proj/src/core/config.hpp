#ifndef LINEAGELAB_CONFIG_HPP
#define LINEAGELAB_CONFIG_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "coarse_grain.hpp"
#include "coupling_lab.hpp"
#include "stats_verify.hpp"

namespace llab {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& msg);
  int line() const { return line_; }  // 0 when not tied to a line

 private:
  int line_;
};

/// Sectioned key = value text. Every key must appear in the schema; values are
/// kept as text with the line they came from.
class IniConfig {
 public:
  struct Entry {
    std::string value;
    int line = 0;             // 0: schema default
    std::string env;          // set when an environment variable overrode the value
  };
  using Schema = std::map<std::string, std::map<std::string, std::string>>;  // section -> key -> default

  static IniConfig parse(const std::string& text, const Schema& schema);
  /// LLAB_<SECTION>_<KEY>, upper-cased; `getenv` is injectable for tests.
  void apply_env(const std::function<const char*(const char*)>& getenv_fn);

  const Entry& entry(const std::string& section, const std::string& key) const;
  std::string str(const std::string& section, const std::string& key) const;
  std::int64_t integer(const std::string& section, const std::string& key) const;
  double real(const std::string& section, const std::string& key) const;
  std::vector<std::int64_t> int_list(const std::string& section, const std::string& key) const;
  bool flag(const std::string& section, const std::string& key) const;

  /// Effective values, sorted, one "section.key=value" per line.
  std::string canonical() const;

 private:
  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& what) const;
  std::map<std::string, std::map<std::string, Entry>> values_;
};

const IniConfig::Schema& experiment_schema();

enum class Model { cp, lbrw };

struct ExperimentConfig {
  std::uint64_t seed = 20240901;
  std::string output_dir = "out";
  int workers = 1;

  Model model = Model::cp;
  int d = 2;
  double p = 0.98;
  int m_relax = 64;

  LbrwParams lbrw;
  std::int64_t lbrw_side = 64, lbrw_burn_in = 200, lbrw_keep = 20;
  std::uint32_t lbrw_init = 14;

  KappaSpec kernel;
  RegenParams regen;

  std::int64_t sim_half_width = 8, sim_steps = 32, sim_path_length = 200;

  int regen_count = 200;
  int regen_replicas = 1000;
  std::int64_t regen_start_distance = 0;
  double tail_fraction = -1;  // negative: tied to the mass beyond the second attempt

  std::vector<std::int64_t> couple_distances{8, 16, 32, 64};
  int couple_replicas = 2000;
  std::int64_t couple_chain_steps = 0;

  int clt_environments = 200, clt_walkers = 500;
  std::vector<std::int64_t> clt_grid{100, 400, 1600};
  int clt_resamples = 1000;
  std::int64_t clt_box_half_width = -1;

  double annulus_r = 20, annulus_r1 = 10, annulus_r2 = 40;
  int annulus_replicas = 1000;
  std::int64_t annulus_max_steps = 100000;

  int d1_replicas = 60;
  std::int64_t d1_length = 1600;
  std::vector<std::int64_t> d1_grid{100, 400, 1600};
  double d1_a = 0.1, d1_b_prime = 0.3;
  std::int64_t d1_box_n = 100;
  int d1_min_visits = 50;

  BlockSpec block;
  Band band;
  int calibration_pairs = 8;
  std::int64_t coarse_width = 20, coarse_layers = 12;
  int contraction_trials = 20;
  std::int64_t height_cap = 50;

  std::vector<std::string> warnings;
  std::string canonical;  // effective configuration text

  CouplingSetup coupling() const;
  CoarseSetup coarse() const;
};

/// Parses, applies environment overrides, converts and validates.
ExperimentConfig load_config(const std::string& text,
                             const std::function<const char*(const char*)>& getenv_fn = nullptr);

}  // namespace llab

#endif
