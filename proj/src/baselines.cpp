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

#include "sfs/baselines.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "sfs/rng.hpp"

namespace sfs {
namespace {

Vector initial_state(const BaselineConfig& cfg, std::size_t dim) {
  return cfg.init.size() == 0 ? Vector::Zero(static_cast<Eigen::Index>(dim)) : cfg.init;
}

[[noreturn]] void abort_chain(const char* method, std::size_t chain, std::size_t iter,
                              const Vector& x) {
  std::ostringstream os;
  os << method << ": non-finite state in chain " << chain << " at iteration " << iter
     << " (|x| = " << x.norm() << ")";
  throw NumericError(os.str());
}

}  // namespace

std::size_t BaselineConfig::kept_per_chain() const {
  const std::size_t b = resolved_burn_in();
  if (iters <= b || thin == 0) return 0;
  return (iters - b + thin - 1) / thin;
}

void BaselineConfig::validate(std::size_t dim) const {
  if (!(step > 0.0) || !std::isfinite(step))
    throw InvalidArgument("baseline: step must be positive");
  if (iters == 0) throw InvalidArgument("baseline: iters must be >= 1");
  if (resolved_burn_in() >= iters)
    throw InvalidArgument("baseline: burn_in must be smaller than iters");
  if (thin == 0) throw InvalidArgument("baseline: thin must be >= 1");
  if (chains == 0) throw InvalidArgument("baseline: chains must be >= 1");
  if (init.size() != 0 && static_cast<std::size_t>(init.size()) != dim)
    throw InvalidArgument("baseline: init has the wrong dimension");
}

SampleBatch ula_run(const Target& target, const BaselineConfig& cfg) {
  const std::size_t p = target.dim();
  cfg.validate(p);
  const auto start = std::chrono::steady_clock::now();
  const std::size_t keep = cfg.kept_per_chain();
  const std::size_t burn = cfg.resolved_burn_in();
  const double h = cfg.step;
  const double noise_scale = std::sqrt(2.0 * h);

  SampleBatch batch;
  batch.points.resize(static_cast<Eigen::Index>(keep * cfg.chains),
                      static_cast<Eigen::Index>(p));
  parallel_for(cfg.chains, cfg.threads, [&](std::size_t begin, std::size_t end) {
    Vector x(p), noise(p), grad_v(p);
    for (std::size_t c = begin; c < end; ++c) {
      Rng rng = Rng::stream(cfg.seed, StreamTag::kChain, c);
      x = initial_state(cfg, p);
      std::size_t row = c * keep;
      for (std::size_t it = 1; it <= cfg.iters; ++it) {
        rng.fill_normal(noise);
        grad_v = x - target.grad_log_g(x);
        x = x - h * grad_v + noise_scale * noise;
        if (!x.allFinite()) abort_chain("ula", c, it, x);
        if (it > burn && (it - burn - 1) % cfg.thin == 0)
          batch.points.row(static_cast<Eigen::Index>(row++)) = x.transpose();
      }
    }
  });
  batch.meta.method = "ula";
  batch.meta.seed = cfg.seed;
  batch.meta.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return batch;
}

double rwmh_log_acceptance(const Target& target, const Eigen::Ref<const Vector>& x,
                           const Eigen::Ref<const Vector>& y) {
  return metropolis_log_acceptance(target.log_g(x) - 0.5 * x.squaredNorm(),
                                   target.log_g(y) - 0.5 * y.squaredNorm());
}

SampleBatch rwmh_run(const Target& target, const BaselineConfig& cfg) {
  const std::size_t p = target.dim();
  cfg.validate(p);
  const auto start = std::chrono::steady_clock::now();
  const std::size_t keep = cfg.kept_per_chain();
  const std::size_t burn = cfg.resolved_burn_in();

  SampleBatch batch;
  batch.points.resize(static_cast<Eigen::Index>(keep * cfg.chains),
                      static_cast<Eigen::Index>(p));
  std::vector<std::size_t> accepted(cfg.chains, 0);
  parallel_for(cfg.chains, cfg.threads, [&](std::size_t begin, std::size_t end) {
    Vector x(p), y(p), noise(p);
    for (std::size_t c = begin; c < end; ++c) {
      Rng rng = Rng::stream(cfg.seed, StreamTag::kChain, c);
      x = initial_state(cfg, p);
      double log_x = target.log_g(x) - 0.5 * x.squaredNorm();
      if (!std::isfinite(log_x)) abort_chain("rwmh", c, 0, x);
      std::size_t row = c * keep;
      for (std::size_t it = 1; it <= cfg.iters; ++it) {
        rng.fill_normal(noise);
        y = x + cfg.step * noise;
        const double log_y = target.log_g(y) - 0.5 * y.squaredNorm();
        const double log_u = std::log(rng.uniform());
        if (!std::isnan(log_y) && log_u < metropolis_log_acceptance(log_x, log_y)) {
          x = y;
          log_x = log_y;
          ++accepted[c];
        }
        if (it > burn && (it - burn - 1) % cfg.thin == 0)
          batch.points.row(static_cast<Eigen::Index>(row++)) = x.transpose();
      }
    }
  });
  std::size_t total = 0;
  for (auto a : accepted) total += a;
  batch.meta.method = "rwmh";
  batch.meta.seed = cfg.seed;
  batch.meta.acceptance_rate =
      static_cast<double>(total) / static_cast<double>(cfg.iters * cfg.chains);
  batch.meta.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return batch;
}

double ula_gaussian_variance(double h, std::size_t k) {
  return 2.0 * (1.0 - std::pow(1.0 - h, 2.0 * static_cast<double>(k))) / (2.0 - h);
}

double ula_gaussian_limit_variance(double h) { return 2.0 / (2.0 - h); }

}  // namespace sfs
