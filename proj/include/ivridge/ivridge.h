#ifndef IVRIDGE_IVRIDGE_H
#define IVRIDGE_IVRIDGE_H

/* C interface to the ivridge library. Objects are opaque handles released
 * with the matching *_free function. Every fallible call returns an
 * ivr_status; the message of the most recent failure on the calling thread
 * is available from ivr_last_error(). */

#include <stddef.h>
#include <stdint.h>

#if defined(IVR_BUILDING_LIBRARY)
#define IVR_API __attribute__((visibility("default")))
#else
#define IVR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ivr_status {
  IVR_OK = 0,
  IVR_ERR_DOMAIN = 1,
  IVR_ERR_CONTRACT = 2,
  IVR_ERR_SINGULARITY = 3,
  IVR_ERR_SOLVER = 4,
  IVR_ERR_DEGENERATE = 5,
  IVR_ERR_UNSUPPORTED = 6,
  IVR_ERR_CONFIG = 7,
  IVR_ERR_IO = 8,
  IVR_ERR_INTERNAL = 9
} ivr_status;

typedef struct ivr_dataset ivr_dataset;
typedef struct ivr_experiments ivr_experiments;

/* Simulation design. sigma is "isotropic", "ar1:<rho_z>" or
 * "equicorrelated:<rho_z>"; NULL means isotropic. */
typedef struct ivr_model_params {
  double beta;
  double rho;
  int n;
  int k;
  double f_stat;
  const char* sigma;
  uint64_t seed;
} ivr_model_params;

/* Limit parameters for theory curves: unit error variances,
 * corr(eps, nu) = rho and alpha^2 = gamma * f_stat. */
typedef struct ivr_theory_params {
  double gamma;
  double rho;
  double f_stat;
  int n;
} ivr_theory_params;

typedef struct ivr_estimate_result {
  double lambda;       /* selected lambda for the cv call */
  double beta_hat;
  double variance_hat; /* NaN when has_variance is 0 */
  double se_hat;
  double signal;       /* estimator denominator / n */
  double v_hat;        /* NaN for lambda-free methods */
  double f_hat_stat;   /* NaN when not identified */
  int has_variance;
  int variance_floored;
} ivr_estimate_result;

IVR_API const char* ivr_version(void);
IVR_API const char* ivr_status_string(ivr_status status);
/* Message of the last failed call on this thread, "" if none. */
IVR_API const char* ivr_last_error(void);

IVR_API void ivr_model_params_default(ivr_model_params* params);
IVR_API void ivr_theory_params_default(ivr_theory_params* params);

IVR_API ivr_status ivr_dataset_generate(const ivr_model_params* params, ivr_dataset** out);
IVR_API ivr_status ivr_dataset_read_csv(const char* path, ivr_dataset** out);
IVR_API ivr_status ivr_dataset_write_csv(const ivr_dataset* data, const char* path);
IVR_API ivr_status ivr_dataset_dims(const ivr_dataset* data, int* n, int* k);
IVR_API void ivr_dataset_free(ivr_dataset* data);

/* method: ols, tsls, ba-tsls, nagar, liml, ridgeless-tsls (or the
 * underscore spellings). lambda is ignored by lambda-free methods. */
IVR_API ivr_status ivr_estimate(const ivr_dataset* data, const char* method, double lambda,
                                ivr_estimate_result* out);
/* Bias-adjusted estimate at the cross-validated lambda. A NULL grid uses
 * 40 log-spaced points on [1e-3, 10]. */
IVR_API ivr_status ivr_estimate_cv(const ivr_dataset* data, const double* grid, size_t count,
                                   ivr_estimate_result* out);

/* kind: bias_tsls_ridge, signal_f, amplifier_a, asy_variance (or bias,
 * signal, amplifier, variance). lambdas must be strictly ascending. */
IVR_API ivr_status ivr_theory_curve(const char* kind, const char* sigma, const ivr_theory_params* params,
                                    const double* lambdas, size_t count, double* values);

IVR_API ivr_status ivr_experiments_from_figure(const char* tag, ivr_experiments** out);
IVR_API ivr_status ivr_experiments_from_json_file(const char* path, ivr_experiments** out);
IVR_API size_t ivr_experiments_size(const ivr_experiments* set);
IVR_API ivr_status ivr_experiments_replications(const ivr_experiments* set, size_t index, int* replications);
IVR_API ivr_status ivr_experiments_set_replications(ivr_experiments* set, int replications);
/* Writes the file stem "<figure_tag>_<gamma>" of experiment `index`. */
IVR_API ivr_status ivr_experiments_describe(const ivr_experiments* set, size_t index, char* buffer, size_t length);
/* Runs every experiment and writes its CSVs into out_dir. workers = 0 uses
 * the hardware concurrency capped by RMT_IV_THREADS. */
IVR_API ivr_status ivr_experiments_run(const ivr_experiments* set, unsigned workers, const char* out_dir);
IVR_API void ivr_experiments_free(ivr_experiments* set);

#ifdef __cplusplus
}
#endif

#endif
