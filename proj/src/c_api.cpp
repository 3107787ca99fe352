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

#include "sfs/sfs.h"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <new>
#include <string>

#include "sfs/experiment.hpp"

struct sfs_target {
  sfs::TargetPtr target;
};

struct sfs_batch {
  sfs::SampleBatch batch;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_error_key;

sfs_status fail(sfs_status status, const std::string& message, std::string key = {}) {
  g_error = message;
  g_error_key = std::move(key);
  return status;
}

// Runs fn, translating library exceptions into status codes.
template <typename Fn>
sfs_status guarded(Fn&& fn) {
  try {
    g_error.clear();
    g_error_key.clear();
    fn();
    return SFS_OK;
  } catch (const sfs::ConfigError& e) {
    return fail(SFS_ERR_CONFIG, e.what(), e.key());
  } catch (const sfs::InvalidArgument& e) {
    return fail(SFS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const sfs::NumericError& e) {
    return fail(SFS_ERR_NUMERIC, e.what());
  } catch (const sfs::IoError& e) {
    return fail(SFS_ERR_IO, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(SFS_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SFS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SFS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SFS_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* message) {
  if (!ok) throw sfs::InvalidArgument(message);
}

sfs::Matrix row_major(const double* data, std::size_t rows, std::size_t cols) {
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      data, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

sfs::Vector vec(const double* data, std::size_t n) {
  return Eigen::Map<const sfs::Vector>(data, static_cast<Eigen::Index>(n));
}

sfs_target* wrap(sfs::TargetPtr t) { return new sfs_target{std::move(t)}; }

sfs::BaselineConfig chain_config(const sfs_chain_options* o, sfs::BaselineKind kind) {
  require(o != nullptr, "null options");
  sfs::BaselineConfig cfg;
  cfg.kind = kind;
  cfg.step = o->step;
  cfg.iters = o->iters;
  if (o->burn_in >= 0) cfg.burn_in = static_cast<std::size_t>(o->burn_in);
  cfg.thin = o->thin;
  cfg.chains = o->chains;
  cfg.seed = o->seed;
  cfg.threads = o->threads;
  return cfg;
}

sfs::RunOptions run_options(const sfs_run_options* o) {
  sfs::RunOptions opts;
  if (o) {
    opts.threads = o->threads;
    opts.quiet = o->quiet != 0;
  }
  opts.log = &std::cerr;
  return opts;
}

}  // namespace

extern "C" {

const char* sfs_version(void) { return SFS_VERSION_STRING; }
const char* sfs_last_error(void) { return g_error.c_str(); }
const char* sfs_last_error_key(void) { return g_error_key.c_str(); }

const char* sfs_status_name(sfs_status status) {
  switch (status) {
    case SFS_OK: return "ok";
    case SFS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SFS_ERR_CONFIG: return "invalid config";
    case SFS_ERR_NUMERIC: return "numeric error";
    case SFS_ERR_IO: return "i/o error";
    case SFS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

sfs_status sfs_target_standard_gaussian(size_t dim, sfs_target** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = wrap(sfs::make_standard_gaussian(dim));
  });
}

sfs_status sfs_target_benchmark(const char* name, int scenario, sfs_target** out) {
  return guarded([&] {
    require(name != nullptr && out != nullptr, "null argument");
    const auto b = sfs::parse_benchmark(name);
    if (!b) throw sfs::InvalidArgument(std::string("unknown benchmark '") + name + "'");
    *out = wrap(sfs::make_mixture_target(sfs::make_benchmark(*b, scenario)));
  });
}

sfs_status sfs_target_mixture(size_t k, size_t p, const double* weights, const double* means,
                              const double* covariances, sfs_target** out) {
  return guarded([&] {
    require(weights && means && covariances && out, "null argument");
    require(k > 0 && p > 0, "mixture needs k >= 1 and p >= 1");
    std::vector<double> w(weights, weights + k);
    std::vector<sfs::Vector> mu;
    std::vector<sfs::Matrix> cov;
    for (std::size_t i = 0; i < k; ++i) {
      mu.push_back(vec(means + i * p, p));
      cov.push_back(row_major(covariances + i * p * p, p, p));
    }
    *out = wrap(sfs::make_gaussian_mixture(std::move(w), std::move(mu), std::move(cov)));
  });
}

sfs_status sfs_target_logistic(size_t n, size_t p, const double* design, const double* labels,
                               const double* prior_precision, sfs_target** out) {
  return guarded([&] {
    require(design && labels && out, "null argument");
    require(n > 0 && p > 0, "logistic data needs n >= 1 and p >= 1");
    sfs::Matrix x = row_major(design, n, p);
    sfs::Matrix precision = prior_precision ? row_major(prior_precision, p, p)
                                            : sfs::empirical_prior_precision(x);
    *out = wrap(sfs::make_logistic_posterior(std::move(x), vec(labels, n), std::move(precision)));
  });
}

sfs_status sfs_target_logistic_csv(const char* path, sfs_target** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = wrap(sfs::load_logistic_posterior(path, sfs::PriorMode::kEmpirical));
  });
}

sfs_status sfs_target_shift(const sfs_target* inner, double offset, sfs_target** out) {
  return guarded([&] {
    require(inner && out, "null argument");
    *out = wrap(sfs::shift_log_g(inner->target, offset));
  });
}

void sfs_target_free(sfs_target* target) { delete target; }

size_t sfs_target_dim(const sfs_target* target) { return target ? target->target->dim() : 0; }

sfs_status sfs_target_log_g(const sfs_target* target, const double* x, double* out) {
  return guarded([&] {
    require(target && x && out, "null argument");
    *out = target->target->log_g(vec(x, target->target->dim()));
  });
}

sfs_status sfs_target_grad_log_g(const sfs_target* target, const double* x, double* out) {
  return guarded([&] {
    require(target && x && out, "null argument");
    const std::size_t p = target->target->dim();
    Eigen::Map<sfs::Vector>(out, static_cast<Eigen::Index>(p)) =
        target->target->grad_log_g(vec(x, p));
  });
}

sfs_status sfs_drift(const sfs_target* target, sfs_drift_kind kind, const double* x, double t,
                     size_t mc_samples, uint64_t seed, double* out) {
  return guarded([&] {
    require(target && x && out, "null argument");
    const std::size_t p = target->target->dim();
    sfs::Vector b;
    if (kind == SFS_DRIFT_EXACT) {
      const auto mix = target->target->closed_form();
      require(mix != nullptr, "exact drift needs a Gaussian mixture target");
      b = sfs::exact_mixture_drift(*mix, vec(x, p), t);
    } else {
      require(kind == SFS_DRIFT_MC_GRADIENT || kind == SFS_DRIFT_MC_STEIN, "unknown drift kind");
      sfs::Rng rng = sfs::Rng::stream(seed, sfs::StreamTag::kUser, 0);
      b = kind == SFS_DRIFT_MC_GRADIENT
              ? sfs::mc_drift_gradient_form(*target->target, vec(x, p), t, mc_samples, rng)
              : sfs::mc_drift_stein_form(*target->target, vec(x, p), t, mc_samples, rng, 0.0);
    }
    Eigen::Map<sfs::Vector>(out, static_cast<Eigen::Index>(p)) = b;
  });
}

void sfs_sampler_options_init(sfs_sampler_options* opts) {
  if (!opts) return;
  *opts = sfs_sampler_options{100, 1000, 0, SFS_DRIFT_EXACT, 1000, 0.0, 0, 1};
}

void sfs_chain_options_init(sfs_chain_options* opts) {
  if (!opts) return;
  *opts = sfs_chain_options{0.1, 10000, -1, 1, 1, 0, 1};
}

sfs_status sfs_sample(const sfs_target* target, const sfs_sampler_options* opts,
                      sfs_batch** out) {
  return guarded([&] {
    require(target && opts && out, "null argument");
    sfs::SamplerBlock block;
    block.method = sfs::Method::kSfs;
    block.steps = opts->steps;
    block.particles = opts->particles;
    block.seed = opts->seed;
    switch (opts->drift) {
      case SFS_DRIFT_EXACT: block.drift = sfs::DriftChoice::kExact; break;
      case SFS_DRIFT_MC_GRADIENT: block.drift = sfs::DriftChoice::kMcGradient; break;
      case SFS_DRIFT_MC_STEIN: block.drift = sfs::DriftChoice::kMcStein; break;
      default: throw sfs::InvalidArgument("unknown drift kind");
    }
    block.mc_samples = opts->mc_samples;
    if (opts->epsilon > 0.0) block.epsilon = opts->epsilon;
    block.record_trajectories = opts->record_trajectories != 0;
    *out = new sfs_batch{sfs::run_sampler(target->target, block, opts->threads)};
  });
}

sfs_status sfs_ula(const sfs_target* target, const sfs_chain_options* opts, sfs_batch** out) {
  return guarded([&] {
    require(target && out, "null argument");
    *out = new sfs_batch{sfs::ula_run(*target->target, chain_config(opts, sfs::BaselineKind::kUla))};
  });
}

sfs_status sfs_rwmh(const sfs_target* target, const sfs_chain_options* opts, sfs_batch** out) {
  return guarded([&] {
    require(target && out, "null argument");
    *out = new sfs_batch{
        sfs::rwmh_run(*target->target, chain_config(opts, sfs::BaselineKind::kRwmh))};
  });
}

size_t sfs_batch_size(const sfs_batch* batch) { return batch ? batch->batch.size() : 0; }
size_t sfs_batch_dim(const sfs_batch* batch) { return batch ? batch->batch.dim() : 0; }

sfs_status sfs_batch_points(const sfs_batch* batch, double* out) {
  return guarded([&] {
    require(batch && out, "null argument");
    const auto& m = batch->batch.points;
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        out, m.rows(), m.cols()) = m;
  });
}

size_t sfs_batch_trajectory_steps(const sfs_batch* batch) {
  return batch ? batch->batch.trajectory_steps : 0;
}

sfs_status sfs_batch_trajectories(const sfs_batch* batch, double* out) {
  return guarded([&] {
    require(batch && out, "null argument");
    require(batch->batch.has_trajectories(), "batch has no trajectories");
    std::copy(batch->batch.trajectories.begin(), batch->batch.trajectories.end(), out);
  });
}

double sfs_batch_acceptance_rate(const sfs_batch* batch) {
  if (!batch || !batch->batch.meta.acceptance_rate)
    return std::numeric_limits<double>::quiet_NaN();
  return *batch->batch.meta.acceptance_rate;
}

double sfs_batch_wall_seconds(const sfs_batch* batch) {
  return batch ? batch->batch.meta.wall_seconds : 0.0;
}

void sfs_batch_free(sfs_batch* batch) { delete batch; }

sfs_status sfs_wasserstein_1d(const double* a, size_t na, const double* b, size_t nb,
                              double order, double* out) {
  return guarded([&] {
    require(a && b && out, "null argument");
    *out = sfs::wasserstein_1d({a, na}, {b, nb}, order);
  });
}

sfs_status sfs_sliced_wasserstein(const double* a, size_t na, const double* b, size_t nb,
                                  size_t dim, double order, size_t projections, uint64_t seed,
                                  double* out) {
  return guarded([&] {
    require(a && b && out, "null argument");
    *out = sfs::sliced_wasserstein(row_major(a, na, dim), row_major(b, nb, dim), order,
                                   projections, seed);
  });
}

sfs_status sfs_mode_proportions(const double* samples, size_t n, size_t dim,
                                const double* centers, size_t k, sfs_assign_method method,
                                double* frequencies) {
  return guarded([&] {
    require(samples && centers && frequencies, "null argument");
    const auto r = sfs::mode_proportions(
        row_major(samples, n, dim), row_major(centers, k, dim),
        method == SFS_ASSIGN_KMEANS ? sfs::AssignMethod::kKMeans : sfs::AssignMethod::kNearest);
    std::copy(r.frequencies.begin(), r.frequencies.end(), frequencies);
  });
}

sfs_status sfs_cmd_sample(const char* config_path, const sfs_run_options* opts) {
  return guarded([&] {
    require(config_path != nullptr, "null config path");
    sfs::cmd_sample(config_path, run_options(opts));
  });
}

sfs_status sfs_cmd_compare(const char* config_path, const sfs_run_options* opts) {
  return guarded([&] {
    require(config_path != nullptr, "null config path");
    sfs::cmd_compare(config_path, run_options(opts));
  });
}

sfs_status sfs_cmd_gen_logistic(size_t n, size_t p, uint64_t seed, const char* out_path) {
  return guarded([&] {
    require(out_path != nullptr, "null output path");
    sfs::cmd_gen_logistic(n, p, seed, out_path);
  });
}

}  // extern "C"
