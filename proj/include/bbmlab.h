/* C interface of the bbmlab shared library.
 *
 * All functions return a bbmlab_status. On failure a message is available
 * from bbmlab_last_error() on the calling thread until its next call into the
 * library. Handles are opaque and owned by the caller; destroy functions
 * accept NULL. Strings returned by the library stay valid until the handle
 * they came from is destroyed.
 */
#ifndef BBMLAB_H
#define BBMLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BBMLAB_API __declspec(dllexport)
#else
#define BBMLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bbmlab_status {
  BBMLAB_OK = 0,
  BBMLAB_ERR_INVALID_ARGUMENT = 1,
  BBMLAB_ERR_PRECONDITION = 2,
  BBMLAB_ERR_CENSORING = 3,
  BBMLAB_ERR_SAMPLE_STARVED = 4,
  BBMLAB_ERR_RESOURCE_EXHAUSTED = 5,
  BBMLAB_ERR_IO = 6,
  BBMLAB_ERR_INTERNAL = 7,
  BBMLAB_ERR_NULL_POINTER = 8
} bbmlab_status;

typedef enum bbmlab_censor_status {
  BBMLAB_EXACT = 0,
  BBMLAB_COUNT_CAPPED = 1,
  BBMLAB_WORK_CAPPED = 2
} bbmlab_censor_status;

typedef struct bbmlab_config bbmlab_config;
typedef struct bbmlab_result bbmlab_result;

BBMLAB_API const char* bbmlab_version(void);
BBMLAB_API const char* bbmlab_status_string(bbmlab_status status);
BBMLAB_API const char* bbmlab_last_error(void);

/* ---- experiment configuration ------------------------------------------ */

/* Starts from the defaults of `command` (sim-n, sim-nx, sim-composed,
 * sim-line, sim-pop, probe-spine). */
BBMLAB_API bbmlab_status bbmlab_config_create(const char* command, bbmlab_config** out);
BBMLAB_API void bbmlab_config_destroy(bbmlab_config* config);

/* Loads a TOML file. Later flag values still win over file values. */
BBMLAB_API bbmlab_status bbmlab_config_load_toml(bbmlab_config* config, const char* path);

/* Sets one key from a JSON literal, e.g. ("barrier_b", "14") or
 * ("windows", "[{\"a\":0.05,\"b\":20,\"lambda\":4}]"). */
BBMLAB_API bbmlab_status bbmlab_config_set(bbmlab_config* config, const char* key, const char* json_value);

/* Resolved configuration as JSON, owned by the config handle. */
BBMLAB_API bbmlab_status bbmlab_config_json(bbmlab_config* config, const char** out_json);

/* ---- runs, verification, reports --------------------------------------- */

/* Runs the configured command. A run that completes but fails its
 * acceptance threshold still returns BBMLAB_OK with exit code 1. */
BBMLAB_API bbmlab_status bbmlab_run(const bbmlab_config* config, bbmlab_result** out);

/* Runs a verification suite ("quick" or "full"). options_json may be NULL or
 * hold {"workers", "seed", "scale", "only", "scratch_dir"}. The callback, if
 * given, receives each criterion's JSON record as it completes. */
typedef void (*bbmlab_criterion_callback)(const char* criterion_json, void* user_data);
BBMLAB_API bbmlab_status bbmlab_verify(const char* suite, const char* options_json,
                                       bbmlab_criterion_callback callback, void* user_data, bbmlab_result** out);

BBMLAB_API int bbmlab_result_exit_code(const bbmlab_result* result);
BBMLAB_API const char* bbmlab_result_message(const bbmlab_result* result);
BBMLAB_API const char* bbmlab_result_json(const bbmlab_result* result);
BBMLAB_API void bbmlab_result_destroy(bbmlab_result* result);

/* Writes report.md and the CSV series into out_dir from every summary.json
 * under in_dir. */
BBMLAB_API bbmlab_status bbmlab_report(const char* in_dir, const char* out_dir);

/* ---- single samples ------------------------------------------------------ */

typedef struct bbmlab_count {
  int64_t value;
  bbmlab_censor_status status;
  int64_t pruned_count;
  int64_t work;
  double bias_bound;
} bbmlab_count;

/* One N_x sample by tree exploration; stream (seed, stream_id). */
BBMLAB_API bbmlab_status bbmlab_explore_tree(double mu, double level_x, double barrier_b, int64_t count_cap,
                                             int64_t node_cap, uint64_t seed, uint64_t stream_id, bbmlab_count* out);

/* Moments 2E[w(V)e^{-V}] for w = 1, v, v^2 at mu = 2. */
BBMLAB_API bbmlab_status bbmlab_boundary_identities(double out_moments[3]);

#ifdef __cplusplus
}
#endif

#endif /* BBMLAB_H */
