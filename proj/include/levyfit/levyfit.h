/* C interface to the levyfit library. All handles are opaque; every call
 * returns an lf_status and, on failure, stores a message retrievable with
 * lf_last_error() on the calling thread. */
#ifndef LEVYFIT_LEVYFIT_H
#define LEVYFIT_LEVYFIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(LEVYFIT_BUILDING_LIBRARY)
#define LF_API __attribute__((visibility("default")))
#else
#define LF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lf_status {
  LF_OK = 0,
  LF_ERR_INVALID_ARGUMENT = 1,
  LF_ERR_PARSE = 2,
  LF_ERR_SCHEMA = 3,
  LF_ERR_DOMAIN = 4,
  LF_ERR_DATA = 5,
  LF_ERR_IO = 6,
  LF_ERR_NUMERIC = 7,
  LF_ERR_OPTIMIZER = 8,
  LF_ERR_SINGULAR = 9,
  LF_ERR_INTERNAL = 10
} lf_status;

typedef struct lf_config lf_config;
typedef struct lf_model lf_model;
typedef struct lf_dataset lf_dataset;

/* Message of the last failed call on this thread ("" if none). */
LF_API const char* lf_last_error(void);
/* Machine-readable category name, e.g. "schema". */
LF_API const char* lf_status_name(lf_status status);
LF_API const char* lf_version(void);
/* Frees strings returned through char** out-parameters. */
LF_API void lf_string_free(char* s);

/* ---- config ---- */
LF_API lf_status lf_config_load(const char* path, lf_config** out);
LF_API lf_status lf_config_parse(const char* json_text, lf_config** out);
LF_API void lf_config_free(lf_config* cfg);

/* Command overrides. NULL strings and has_* == 0 leave the config value. */
typedef struct lf_run_options {
  const char* data;
  const char* out;
  const char* mode;      /* noincr | incr | incrpar */
  const char* families;  /* comma separated */
  const char* coef;
  const char* residuals;
  int has_aggregation;
  int aggregation;
  int has_seed;
  uint64_t seed;
  int has_horizon;
  double horizon;
  int has_reps;
  size_t reps;
  int has_component;
  size_t component;
} lf_run_options;

/* Zero-initialises an options struct. */
LF_API void lf_run_options_init(lf_run_options* opts);

/* Workflows. `summary` (may be NULL) receives the human-readable report. */
LF_API lf_status lf_cmd_simulate(const lf_config* cfg, const lf_run_options* opts, char** summary);
LF_API lf_status lf_cmd_fit(const lf_config* cfg, const lf_run_options* opts, char** summary);
LF_API lf_status lf_cmd_select(const lf_config* cfg, const lf_run_options* opts, char** summary);
LF_API lf_status lf_cmd_forecast(const lf_config* cfg, const lf_run_options* opts, char** summary);

/* ---- model ---- */
LF_API lf_status lf_model_from_config(const lf_config* cfg, lf_model** out);
LF_API void lf_model_free(lf_model* model);
LF_API lf_status lf_model_sizes(const lf_model* model, size_t* dim, size_t* p_gamma, size_t* p_alpha,
                                size_t* p_eta);
/* Name of parameter `index` in (gamma, alpha, eta) order. */
LF_API lf_status lf_model_param_name(const lf_model* model, size_t index, char** name);

/* ---- dataset ---- */
/* delta <= 0 infers the spacing from a time column. */
LF_API lf_status lf_dataset_load(const char* path, double delta, lf_dataset** out);
/* values: (n+1) x d row-major. */
LF_API lf_status lf_dataset_from_array(const double* values, size_t rows, size_t dim, double delta, double t0,
                                       lf_dataset** out);
LF_API void lf_dataset_free(lf_dataset* ds);
LF_API lf_status lf_dataset_shape(const lf_dataset* ds, size_t* rows, size_t* dim, double* delta);
/* Copies rows*dim values row-major into `out`. */
LF_API lf_status lf_dataset_values(const lf_dataset* ds, double* out);

/* ---- estimation ---- */
/* Euler path; `noise` (may be NULL) receives n*dim increments row-major. */
LF_API lf_status lf_simulate(const lf_model* model, const double* gamma, const double* alpha, const double* eta,
                             double t0, double terminal, size_t n, const double* x0, uint64_t seed,
                             lf_dataset** path, double* noise);
/* Scale quasi-likelihood; grad (may be NULL) has p_gamma entries. */
LF_API lf_status lf_h1(const lf_dataset* ds, const lf_model* model, const double* gamma, double* value,
                       double* grad);
/* Drift quasi-likelihood at fixed gamma_hat; grad (may be NULL) has p_alpha entries. */
LF_API lf_status lf_h2(const lf_dataset* ds, const lf_model* model, const double* gamma_hat, const double* alpha,
                       double* value, double* grad);
/* Stepwise fit over the model boxes. */
LF_API lf_status lf_fit_gqmle(const lf_dataset* ds, const lf_model* model, int multistart, uint64_t seed,
                              double* gamma_hat, double* alpha_hat);
/* Small-time residuals (n*dim) and unit residuals (floor(T)*dim); either may be NULL.
 * unit_rows (may be NULL) receives floor(T). */
LF_API lf_status lf_residuals(const lf_dataset* ds, const lf_model* model, const double* gamma, const double* alpha,
                              double* small, double* unit, size_t* unit_rows);

#ifdef __cplusplus
}
#endif

#endif
