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

#ifndef SFS_BASELINES_HPP
#define SFS_BASELINES_HPP

#include <cstdint>
#include <optional>

#include "sfs/common.hpp"
#include "sfs/sampler.hpp"
#include "sfs/targets.hpp"

namespace sfs {

enum class BaselineKind { kUla, kRwmh };

struct BaselineConfig {
  BaselineKind kind = BaselineKind::kUla;
  double step = 0.1;               // ULA step h, or RWMH proposal std
  std::size_t iters = 10000;
  std::optional<std::size_t> burn_in;  // defaults to iters / 5
  std::size_t thin = 1;
  std::uint64_t seed = 0;
  Vector init;                     // empty = origin
  std::size_t chains = 1;          // independent chains, seeds split per chain
  unsigned threads = 1;

  std::size_t resolved_burn_in() const { return burn_in.value_or(iters / 5); }
  /// States each chain contributes after burn-in and thinning.
  std::size_t kept_per_chain() const;
  void validate(std::size_t dim) const;
};

/// Unadjusted Langevin: x <- x - h grad V(x) + sqrt(2h) eps, with
/// grad V(x) = x - grad log g(x). Chains are concatenated in the output.
SampleBatch ula_run(const Target& target, const BaselineConfig& cfg);

/// Gaussian random-walk Metropolis-Hastings with proposal std h. The
/// acceptance rate over all chains is recorded in meta.
SampleBatch rwmh_run(const Target& target, const BaselineConfig& cfg);

/// log of the Metropolis acceptance probability min(1, mu(y) / mu(x)),
/// using log mu(x) = log g(x) - |x|^2 / 2 + const.
double rwmh_log_acceptance(const Target& target, const Eigen::Ref<const Vector>& x,
                           const Eigen::Ref<const Vector>& y);

/// Same rule from precomputed unnormalized log densities.
inline double metropolis_log_acceptance(double log_density_x, double log_density_y) {
  const double diff = log_density_y - log_density_x;
  return diff < 0.0 ? diff : 0.0;
}

/// Per-coordinate variance of ULA on N(0, I) after k steps from the origin,
/// 2 (1 - (1-h)^{2k}) / (2 - h); the limit k -> inf is 2 / (2 - h).
double ula_gaussian_variance(double h, std::size_t k);
double ula_gaussian_limit_variance(double h);

}  // namespace sfs

#endif  // SFS_BASELINES_HPP
