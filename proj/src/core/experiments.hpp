#ifndef LINEAGELAB_EXPERIMENTS_HPP
#define LINEAGELAB_EXPERIMENTS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace llab {

const std::vector<std::string>& subcommands();

std::string sha256_hex(const std::string& data);

/// Hash over the code version, the subcommand and the effective configuration,
/// leaving out settings that do not change results (output directory, workers).
std::string manifest_hash(const ExperimentConfig& cfg, const std::string& subcommand);

struct RunOutcome {
  std::string hash;
  std::string directory;
  std::vector<std::string> artifacts;
  bool truncated = false;
  nlohmann::ordered_json summary;
};

/// Writes artifacts under <output_dir>/<subcommand>/; every CSV starts with
/// "# manifest <hash>" and every JSON-lines file with {"manifest": hash}.
RunOutcome run_experiment(const ExperimentConfig& cfg, const std::string& subcommand);

/// Hill tail fraction tied to the mass beyond `threshold`: 0.2 times that mass, capped at 0.2.
double tail_fraction_rule(const std::vector<double>& samples, double threshold);

/// Checks that every artifact in a run directory carries the hash in manifest.json.
/// Returns the offending file names.
std::vector<std::string> verify_run(const std::string& directory);

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stacks analysis CSVs into one long table with a run_id column. Every input
/// must share the header of the first; the first column is the grid and
/// estimate, lo, hi must be present.
void plotdata(const std::vector<std::string>& inputs, std::ostream& out);

}  // namespace llab

#endif
