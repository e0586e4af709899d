/* lineagelab C interface. All functions return llab_status; on failure the
 * message is available from llab_last_error() on the calling thread. */
#ifndef LINEAGELAB_H
#define LINEAGELAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LLAB_API __declspec(dllexport)
#else
#define LLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum llab_status {
  LLAB_OK = 0,
  LLAB_ERR_ARGUMENT = 1, /* null pointer or out-of-range argument */
  LLAB_ERR_CONFIG = 2,   /* configuration rejected; see llab_last_error_line */
  LLAB_ERR_IO = 3,
  LLAB_ERR_SCHEMA = 4,   /* plotdata input does not match */
  LLAB_ERR_RUNTIME = 5,
  LLAB_ERR_INTERNAL = 6
} llab_status;

typedef struct llab_config llab_config;
typedef struct llab_env llab_env;

LLAB_API const char* llab_version(void);
LLAB_API const char* llab_last_error(void);
/* Line of the last configuration error, 0 if not tied to a line. */
LLAB_API int llab_last_error_line(void);
LLAB_API const char* llab_status_string(llab_status s);

/* Configuration. Environment variables LLAB_<SECTION>_<KEY> override file values. */
LLAB_API llab_status llab_config_load_file(const char* path, llab_config** out);
LLAB_API llab_status llab_config_load_string(const char* text, llab_config** out);
LLAB_API void llab_config_free(llab_config* cfg);
LLAB_API size_t llab_config_warning_count(const llab_config* cfg);
LLAB_API const char* llab_config_warning(const llab_config* cfg, size_t i);
/* Effective configuration text, one section.key=value per line. */
LLAB_API const char* llab_config_canonical(const llab_config* cfg);

/* Runs a subcommand. output_dir may be NULL and workers 0 to keep the config values.
 * hash_out receives the 64-hex manifest hash plus terminator when not NULL. */
LLAB_API llab_status llab_run(const llab_config* cfg, const char* subcommand, const char* output_dir, int workers,
                              char hash_out[65], int* truncated);
LLAB_API size_t llab_subcommand_count(void);
LLAB_API const char* llab_subcommand_name(size_t i);

/* Stacks analysis CSVs into a long table written to output_path. */
LLAB_API llab_status llab_plotdata(const char* const* inputs, size_t n_inputs, const char* output_path);
/* Number of artifacts in a run directory whose manifest hash does not match. */
LLAB_API llab_status llab_verify_run(const char* directory, size_t* mismatches);

/* Contact-process environment on a Bernoulli(p) field. x has d entries. */
LLAB_API llab_status llab_env_create(uint64_t seed, uint32_t stream, double p, int d, int m_relax, llab_env** out);
LLAB_API void llab_env_free(llab_env* env);
LLAB_API llab_status llab_env_omega(const llab_env* env, const int64_t* x, int64_t n, int* open);
LLAB_API llab_status llab_env_eta(llab_env* env, const int64_t* x, int64_t n, int* value);

/* Coarse graining of one coordinate. */
LLAB_API llab_status llab_cg(int64_t x, int64_t block_side, int64_t* coarse, int64_t* offset);
/* Hill estimate of the tail exponent from the top tail_fraction of samples. */
LLAB_API llab_status llab_hill(const double* samples, size_t n, double tail_fraction, double* beta);
/* Exit probability of d-dimensional Brownian motion from radius r through r2 before r1. */
LLAB_API llab_status llab_annulus_reference(int d, double r, double r1, double r2, double* out);

#ifdef __cplusplus
}
#endif

#endif
