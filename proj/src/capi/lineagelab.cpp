#include "lineagelab/lineagelab.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "config.hpp"
#include "contact_env.hpp"
#include "experiments.hpp"

struct llab_config {
  llab::ExperimentConfig cfg;
};

struct llab_env {
  std::unique_ptr<llab::OmegaField> omega;
  std::unique_ptr<llab::EtaOracle> eta;
  int d = 1;
};

namespace {

thread_local std::string g_error;
thread_local int g_error_line = 0;

llab_status fail(llab_status s, const std::string& msg, int line = 0) {
  g_error = msg;
  g_error_line = line;
  return s;
}

template <class F>
llab_status guarded(F&& f) {
  g_error.clear();
  g_error_line = 0;
  try {
    return f();
  } catch (const llab::ConfigError& e) {
    return fail(LLAB_ERR_CONFIG, e.what(), e.line());
  } catch (const llab::SchemaError& e) {
    return fail(LLAB_ERR_SCHEMA, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(LLAB_ERR_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(LLAB_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(LLAB_ERR_INTERNAL, "unknown exception");
  }
}

llab::Vec to_vec(const int64_t* x, int d) {
  llab::Vec v{};
  for (int i = 0; i < d; ++i) v[i] = x[i];
  return v;
}

}  // namespace

extern "C" {

const char* llab_version(void) { return LLAB_VERSION_STRING; }
const char* llab_last_error(void) { return g_error.c_str(); }
int llab_last_error_line(void) { return g_error_line; }

const char* llab_status_string(llab_status s) {
  switch (s) {
    case LLAB_OK: return "ok";
    case LLAB_ERR_ARGUMENT: return "invalid argument";
    case LLAB_ERR_CONFIG: return "invalid configuration";
    case LLAB_ERR_IO: return "i/o error";
    case LLAB_ERR_SCHEMA: return "schema mismatch";
    case LLAB_ERR_RUNTIME: return "runtime error";
    case LLAB_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

llab_status llab_config_load_string(const char* text, llab_config** out) {
  if (!text || !out) return fail(LLAB_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<llab_config>();
    c->cfg = llab::load_config(text);
    *out = c.release();
    return LLAB_OK;
  });
}

llab_status llab_config_load_file(const char* path, llab_config** out) {
  if (!path || !out) return fail(LLAB_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  std::ifstream f(path);
  if (!f) return fail(LLAB_ERR_IO, std::string("cannot read config ") + path);
  std::ostringstream text;
  text << f.rdbuf();
  const llab_status s = llab_config_load_string(text.str().c_str(), out);
  if (s == LLAB_ERR_CONFIG) g_error = std::string(path) + ": " + g_error;
  return s;
}

void llab_config_free(llab_config* cfg) { delete cfg; }

size_t llab_config_warning_count(const llab_config* cfg) { return cfg ? cfg->cfg.warnings.size() : 0; }

const char* llab_config_warning(const llab_config* cfg, size_t i) {
  if (!cfg || i >= cfg->cfg.warnings.size()) return nullptr;
  return cfg->cfg.warnings[i].c_str();
}

const char* llab_config_canonical(const llab_config* cfg) { return cfg ? cfg->cfg.canonical.c_str() : nullptr; }

llab_status llab_run(const llab_config* cfg, const char* subcommand, const char* output_dir, int workers,
                     char hash_out[65], int* truncated) {
  if (!cfg || !subcommand) return fail(LLAB_ERR_ARGUMENT, "null argument");
  if (workers < 0) return fail(LLAB_ERR_ARGUMENT, "workers must be nonnegative");
  return guarded([&] {
    llab::ExperimentConfig c = cfg->cfg;
    if (output_dir) c.output_dir = output_dir;
    if (workers > 0) c.workers = workers;
    const llab::RunOutcome r = llab::run_experiment(c, subcommand);
    if (hash_out) {
      std::strncpy(hash_out, r.hash.c_str(), 64);
      hash_out[64] = '\0';
    }
    if (truncated) *truncated = r.truncated ? 1 : 0;
    return LLAB_OK;
  });
}

size_t llab_subcommand_count(void) { return llab::subcommands().size(); }

const char* llab_subcommand_name(size_t i) {
  return i < llab::subcommands().size() ? llab::subcommands()[i].c_str() : nullptr;
}

llab_status llab_plotdata(const char* const* inputs, size_t n_inputs, const char* output_path) {
  if ((!inputs && n_inputs) || !output_path) return fail(LLAB_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<std::string> in;
    for (size_t i = 0; i < n_inputs; ++i) {
      if (!inputs[i]) return fail(LLAB_ERR_ARGUMENT, "null input path");
      in.emplace_back(inputs[i]);
    }
    std::ostringstream body;
    llab::plotdata(in, body);
    std::ofstream f(output_path, std::ios::binary);
    if (!f) return fail(LLAB_ERR_IO, std::string("cannot write ") + output_path);
    f << body.str();
    return LLAB_OK;
  });
}

llab_status llab_verify_run(const char* directory, size_t* mismatches) {
  if (!directory || !mismatches) return fail(LLAB_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const auto bad = llab::verify_run(directory);
    *mismatches = bad.size();
    if (!bad.empty()) {
      std::string msg = "manifest mismatch:";
      for (const auto& b : bad) msg += " " + b;
      g_error = msg;
    }
    return LLAB_OK;
  });
}

llab_status llab_env_create(uint64_t seed, uint32_t stream, double p, int d, int m_relax, llab_env** out) {
  if (!out) return fail(LLAB_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  if (d < 1 || d > llab::kMaxDim) return fail(LLAB_ERR_ARGUMENT, "d must be 1, 2 or 3");
  if (!(p >= 0 && p <= 1)) return fail(LLAB_ERR_ARGUMENT, "p must lie in [0,1]");
  return guarded([&] {
    auto e = std::make_unique<llab_env>();
    e->omega = std::make_unique<llab::OmegaField>(seed, llab::medium_stream(stream), p);
    e->eta = std::make_unique<llab::EtaOracle>(*e->omega, d, m_relax);
    e->d = d;
    *out = e.release();
    return LLAB_OK;
  });
}

void llab_env_free(llab_env* env) { delete env; }

llab_status llab_env_omega(const llab_env* env, const int64_t* x, int64_t n, int* open) {
  if (!env || !x || !open) return fail(LLAB_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *open = env->omega->open(llab::Site{to_vec(x, env->d), n}) ? 1 : 0;
    return LLAB_OK;
  });
}

llab_status llab_env_eta(llab_env* env, const int64_t* x, int64_t n, int* value) {
  if (!env || !x || !value) return fail(LLAB_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *value = env->eta->eta(llab::Site{to_vec(x, env->d), n}) ? 1 : 0;
    return LLAB_OK;
  });
}

llab_status llab_cg(int64_t x, int64_t block_side, int64_t* coarse, int64_t* offset) {
  if (!coarse || !offset) return fail(LLAB_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *coarse = llab::cg_pi(x, block_side);
    *offset = llab::cg_rho(x, block_side);
    return LLAB_OK;
  });
}

llab_status llab_hill(const double* samples, size_t n, double tail_fraction, double* beta) {
  if (!samples || !beta) return fail(LLAB_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *beta = llab::hill(std::vector<double>(samples, samples + n), tail_fraction);
    return LLAB_OK;
  });
}

llab_status llab_annulus_reference(int d, double r, double r1, double r2, double* out) {
  if (!out) return fail(LLAB_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = llab::f_d(d, r, r1, r2);
    return LLAB_OK;
  });
}

}  // extern "C"
