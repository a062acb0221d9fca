#ifndef LRARE_H
#define LRARE_H

#include <stddef.h>
#include <stdint.h>

#if defined(LRARE_BUILDING_LIBRARY)
#define LRARE_API __attribute__((visibility("default")))
#else
#define LRARE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lrare_status {
  LRARE_OK = 0,
  LRARE_CONFIG_ERROR = 1,
  LRARE_RUNTIME_ERROR = 2,
  LRARE_INVALID_ARGUMENT = 3
} lrare_status;

typedef struct lrare_config lrare_config;
typedef struct lrare_report lrare_report;
typedef struct lrare_potential lrare_potential;

LRARE_API const char* lrare_version(void);

/* Message of the last failed call on this thread ("" if none). */
LRARE_API const char* lrare_last_error(void);

/* ---- experiment configuration ---------------------------------------- */

LRARE_API lrare_status lrare_config_create(lrare_config** out);
LRARE_API void lrare_config_destroy(lrare_config* config);
/* Applies key=value lines; `source` names the text in error messages. */
LRARE_API lrare_status lrare_config_parse(lrare_config* config,
                                          const char* text,
                                          const char* source);
LRARE_API lrare_status lrare_config_load_file(lrare_config* config,
                                              const char* path);
LRARE_API lrare_status lrare_config_set(lrare_config* config, const char* key,
                                        const char* value);
/* Checks cross-field constraints without running anything. */
LRARE_API lrare_status lrare_config_check(const lrare_config* config);
/* Number of documented keys and the i-th key name. */
LRARE_API size_t lrare_config_key_count(void);
LRARE_API const char* lrare_config_key(size_t index);

/* ---- reports (CSV or key=value text) --------------------------------- */

LRARE_API lrare_status lrare_config_echo(const lrare_config* config,
                                         lrare_report** out);
/* workers = 0 selects LRARE_WORKERS or the hardware concurrency. */
LRARE_API lrare_status lrare_run(const lrare_config* config, size_t workers,
                                 lrare_report** out);
LRARE_API lrare_status lrare_validate(const lrare_config* config,
                                      lrare_report** out);
LRARE_API const char* lrare_report_text(const lrare_report* report);
LRARE_API size_t lrare_report_size(const lrare_report* report);
LRARE_API void lrare_report_destroy(lrare_report* report);

/* ---- potentials -------------------------------------------------------- */

/* "zero", "linear a=<f>", "quadratic k=<f>", "cosine_well". */
LRARE_API lrare_status lrare_potential_create(const char* spec, size_t dim,
                                              lrare_potential** out);
typedef enum lrare_transform {
  LRARE_FLATTEN = 0,
  LRARE_INVERT = 1
} lrare_transform;
/* Region spec as in the config key "region". */
LRARE_API lrare_status lrare_potential_transform(const lrare_potential* base,
                                                 const char* region,
                                                 lrare_transform kind,
                                                 lrare_potential** out);
LRARE_API void lrare_potential_destroy(lrare_potential* potential);
LRARE_API size_t lrare_potential_dimension(const lrare_potential* potential);
LRARE_API lrare_status lrare_potential_value(const lrare_potential* potential,
                                             const double* x, double* out);
LRARE_API lrare_status lrare_potential_gradient(
    const lrare_potential* potential, const double* x, double* out);
LRARE_API lrare_status lrare_potential_laplacian(
    const lrare_potential* potential, const double* x, double* out);
/* sigma^2 Lap V(x) - |grad V(x)|^2 */
LRARE_API lrare_status lrare_generator_self(const lrare_potential* potential,
                                            double sigma, const double* x,
                                            double* out);

/* ---- module entry points ---------------------------------------------- */

typedef struct lrare_density_result {
  double approx;
  double lower;
  double upper;
  double delta;
  double K;
} lrare_density_result;

LRARE_API lrare_status lrare_density_estimate(const lrare_potential* V,
                                              double sigma, const double* x,
                                              const double* y, double t,
                                              lrare_density_result* out);

/* One-dimensional escape probability P(X_T not in (a, b)). dx, dt <= 0
   select the defaults. */
LRARE_API lrare_status lrare_fp_escape(const lrare_potential* V, double sigma,
                                       double x0, double a, double b, double T,
                                       double dx, double dt, double* out);

LRARE_API lrare_status lrare_action_minimize(const lrare_potential* V,
                                             const double* x0,
                                             const char* region, double T,
                                             size_t knots, size_t restarts,
                                             double* value, int* converged);

typedef struct lrare_summary {
  uint64_t n;
  uint64_t hits;
  double mean;
  double variance;
  double std_error;
  double lambda; /* NaN when there were no hits */
} lrare_summary;

LRARE_API lrare_status lrare_run_plain(const lrare_potential* V, double sigma,
                                       const double* x0, const char* region,
                                       double T, double h, size_t N,
                                       uint64_t seed, size_t workers,
                                       lrare_summary* out);
LRARE_API lrare_status lrare_run_importance(
    const lrare_potential* V, const lrare_potential* Vtilde, double sigma,
    const double* x0, const char* region, double T, double h, double tau,
    size_t N, uint64_t seed, size_t workers, lrare_summary* out);

#ifdef __cplusplus
}
#endif

#endif /* LRARE_H */
