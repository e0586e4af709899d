#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "lineagelab/lineagelab.h"

namespace {

int report(llab_status s) {
  std::fprintf(stderr, "lineagelab: %s: %s\n", llab_status_string(s), llab_last_error());
  return s == LLAB_ERR_CONFIG ? 2 : 1;
}

int run_subcommand(const std::string& name, const std::string& config, const std::string& out_dir, int workers) {
  llab_config* cfg = nullptr;
  llab_status s = llab_config_load_file(config.c_str(), &cfg);
  if (s != LLAB_OK) return report(s);
  for (size_t i = 0; i < llab_config_warning_count(cfg); ++i)
    std::fprintf(stderr, "lineagelab: warning: %s\n", llab_config_warning(cfg, i));
  char hash[65] = {0};
  int truncated = 0;
  s = llab_run(cfg, name.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(), workers, hash, &truncated);
  llab_config_free(cfg);
  if (s != LLAB_OK) return report(s);
  std::printf("%s manifest %s%s\n", name.c_str(), hash, truncated ? " (truncated)" : "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lineagelab: ancestral lineages in spatial population models"};
  app.set_version_flag("--version", std::string(llab_version()));
  app.require_subcommand(1);

  std::string config, out_dir;
  int workers = 0;
  std::vector<CLI::App*> runs;
  for (size_t i = 0; i < llab_subcommand_count(); ++i) {
    const std::string name = llab_subcommand_name(i);
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("-c,--config", config, "configuration file")->required()->envname("LLAB_CONFIG");
    sub->add_option("-o,--output-dir", out_dir, "override run.output_dir")->envname("LLAB_OUTPUT_DIR");
    sub->add_option("-j,--workers", workers, "override run.workers")->envname("LLAB_WORKERS")->check(CLI::NonNegativeNumber);
    runs.push_back(sub);
  }

  std::vector<std::string> inputs;
  std::string plot_out;
  CLI::App* plot = app.add_subcommand("plotdata", "stack analysis CSVs into a long table");
  plot->add_option("inputs", inputs, "analysis CSV files");
  plot->add_option("-o,--output", plot_out, "output CSV")->required()->envname("LLAB_PLOT_OUTPUT");

  std::string verify_dir;
  CLI::App* verify = app.add_subcommand("verify", "check that artifacts carry their run's manifest hash");
  verify->add_option("directory", verify_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  for (CLI::App* sub : runs)
    if (sub->parsed()) return run_subcommand(sub->get_name(), config, out_dir, workers);

  if (plot->parsed()) {
    std::vector<const char*> ptrs;
    for (const auto& s : inputs) ptrs.push_back(s.c_str());
    const llab_status s = llab_plotdata(ptrs.data(), ptrs.size(), plot_out.c_str());
    return s == LLAB_OK ? 0 : report(s);
  }

  size_t bad = 0;
  const llab_status s = llab_verify_run(verify_dir.c_str(), &bad);
  if (s != LLAB_OK) return report(s);
  if (bad) {
    std::fprintf(stderr, "lineagelab: %s\n", llab_last_error());
    return 1;
  }
  std::printf("%s: all artifacts match\n", verify_dir.c_str());
  return 0;
}
