// Copyright 2026 The sfs Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// C interface of libsfs.
//
// Every call returns an sfs_status; on failure sfs_last_error() holds a
// message for the calling thread. Matrices are row-major, one point per row.
// Handles are opaque and must be released with the matching *_free.

#ifndef SFS_SFS_H
#define SFS_SFS_H

#include <stddef.h>
#include <stdint.h>

#if defined(SFS_BUILDING_LIBRARY)
#define SFS_API __attribute__((visibility("default")))
#else
#define SFS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sfs_status {
  SFS_OK = 0,
  SFS_ERR_INVALID_ARGUMENT = 1,
  SFS_ERR_CONFIG = 2,
  SFS_ERR_NUMERIC = 3,
  SFS_ERR_IO = 4,
  SFS_ERR_INTERNAL = 5
} sfs_status;

typedef enum sfs_drift_kind {
  SFS_DRIFT_EXACT = 0,
  SFS_DRIFT_MC_GRADIENT = 1,
  SFS_DRIFT_MC_STEIN = 2
} sfs_drift_kind;

typedef enum sfs_assign_method {
  SFS_ASSIGN_NEAREST = 0,
  SFS_ASSIGN_KMEANS = 1
} sfs_assign_method;

typedef struct sfs_target sfs_target;
typedef struct sfs_batch sfs_batch;

SFS_API const char* sfs_version(void);
/* Message of the last failed call on this thread ("" if none). */
SFS_API const char* sfs_last_error(void);
/* Config key path of the last SFS_ERR_CONFIG on this thread ("" if none). */
SFS_API const char* sfs_last_error_key(void);
SFS_API const char* sfs_status_name(sfs_status status);

/* Targets ---------------------------------------------------------------- */

SFS_API sfs_status sfs_target_standard_gaussian(size_t dim, sfs_target** out);
/* Named benchmark (f1, circle8, grid16, ...) and 1-based scenario. */
SFS_API sfs_status sfs_target_benchmark(const char* name, int scenario, sfs_target** out);
/* k components in dimension p: weights[k], means[k*p], covariances[k*p*p]. */
SFS_API sfs_status sfs_target_mixture(size_t k, size_t p, const double* weights,
                                      const double* means, const double* covariances,
                                      sfs_target** out);
/* Logistic posterior from design[n*p] and labels[n]. A NULL prior precision
   (p*p) selects the empirical one, X^T X / n. */
SFS_API sfs_status sfs_target_logistic(size_t n, size_t p, const double* design,
                                       const double* labels,
                                       const double* prior_precision, sfs_target** out);
SFS_API sfs_status sfs_target_logistic_csv(const char* path, sfs_target** out);
/* Same target with log g shifted by `offset`. */
SFS_API sfs_status sfs_target_shift(const sfs_target* inner, double offset, sfs_target** out);
SFS_API void sfs_target_free(sfs_target* target);

SFS_API size_t sfs_target_dim(const sfs_target* target);
SFS_API sfs_status sfs_target_log_g(const sfs_target* target, const double* x, double* out);
SFS_API sfs_status sfs_target_grad_log_g(const sfs_target* target, const double* x,
                                         double* out);

/* Drift ------------------------------------------------------------------ */

/* Drift at (x, t). Monte Carlo kinds draw `mc_samples` normals from `seed`. */
SFS_API sfs_status sfs_drift(const sfs_target* target, sfs_drift_kind kind,
                             const double* x, double t, size_t mc_samples,
                             uint64_t seed, double* out);

/* Sampling --------------------------------------------------------------- */

typedef struct sfs_sampler_options {
  size_t steps;
  size_t particles;
  uint64_t seed;
  sfs_drift_kind drift;
  size_t mc_samples;
  double epsilon; /* <= 0 disables regularization */
  int record_trajectories;
  unsigned threads; /* 0 = all cores */
} sfs_sampler_options;

typedef struct sfs_chain_options {
  double step;
  size_t iters;
  int64_t burn_in; /* < 0 selects iters / 5 */
  size_t thin;
  size_t chains;
  uint64_t seed;
  unsigned threads;
} sfs_chain_options;

SFS_API void sfs_sampler_options_init(sfs_sampler_options* opts);
SFS_API void sfs_chain_options_init(sfs_chain_options* opts);

SFS_API sfs_status sfs_sample(const sfs_target* target, const sfs_sampler_options* opts,
                              sfs_batch** out);
SFS_API sfs_status sfs_ula(const sfs_target* target, const sfs_chain_options* opts,
                           sfs_batch** out);
SFS_API sfs_status sfs_rwmh(const sfs_target* target, const sfs_chain_options* opts,
                            sfs_batch** out);

SFS_API size_t sfs_batch_size(const sfs_batch* batch);
SFS_API size_t sfs_batch_dim(const sfs_batch* batch);
/* Copies size*dim values, row-major. */
SFS_API sfs_status sfs_batch_points(const sfs_batch* batch, double* out);
/* K + 1 when trajectories were recorded, else 0. */
SFS_API size_t sfs_batch_trajectory_steps(const sfs_batch* batch);
/* Copies size*(K+1)*dim values: particle, then step, then coordinate. */
SFS_API sfs_status sfs_batch_trajectories(const sfs_batch* batch, double* out);
/* NaN unless the batch comes from sfs_rwmh. */
SFS_API double sfs_batch_acceptance_rate(const sfs_batch* batch);
SFS_API double sfs_batch_wall_seconds(const sfs_batch* batch);
SFS_API void sfs_batch_free(sfs_batch* batch);

/* Diagnostics ------------------------------------------------------------ */

SFS_API sfs_status sfs_wasserstein_1d(const double* a, size_t na, const double* b,
                                      size_t nb, double order, double* out);
SFS_API sfs_status sfs_sliced_wasserstein(const double* a, size_t na, const double* b,
                                          size_t nb, size_t dim, double order,
                                          size_t projections, uint64_t seed, double* out);
/* Writes k frequencies for the given centers[k*dim]. */
SFS_API sfs_status sfs_mode_proportions(const double* samples, size_t n, size_t dim,
                                        const double* centers, size_t k,
                                        sfs_assign_method method, double* frequencies);

/* Commands --------------------------------------------------------------- */

typedef struct sfs_run_options {
  unsigned threads;
  int quiet; /* progress lines go to stderr unless set */
} sfs_run_options;

SFS_API sfs_status sfs_cmd_sample(const char* config_path, const sfs_run_options* opts);
SFS_API sfs_status sfs_cmd_compare(const char* config_path, const sfs_run_options* opts);
SFS_API sfs_status sfs_cmd_gen_logistic(size_t n, size_t p, uint64_t seed,
                                        const char* out_path);

#ifdef __cplusplus
}
#endif

#endif  // SFS_SFS_H
