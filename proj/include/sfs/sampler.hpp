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

#ifndef SFS_SAMPLER_HPP
#define SFS_SAMPLER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfs/common.hpp"
#include "sfs/drift.hpp"

namespace sfs {

struct SamplerConfig {
  std::size_t steps = 100;       // K; step size s = 1/K
  std::size_t particles = 1000;  // N
  std::uint64_t seed = 0;
  DriftEvaluator drift;
  bool record_trajectories = false;
  unsigned threads = 1;          // 0 = hardware concurrency
  // Index of the first particle. Particle i always uses stream i of the
  // seed, so a run can be split into shards that concatenate to the
  // unsharded result.
  std::size_t first_particle = 0;
};

struct BatchMeta {
  std::string method;
  std::string target_label;
  std::string config_hash;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::optional<double> acceptance_rate;
};

/// N terminal points (rows) plus optional trajectories.
struct SampleBatch {
  Matrix points;
  /// Row-major N x (K+1) x p when recorded; trajectory i, step k, coordinate
  /// j lives at ((i * (K+1)) + k) * p + j.
  std::vector<double> trajectories;
  std::size_t trajectory_steps = 0;  // K + 1 when recorded, else 0
  BatchMeta meta;

  std::size_t size() const noexcept { return static_cast<std::size_t>(points.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(points.cols()); }
  bool has_trajectories() const noexcept { return trajectory_steps > 0; }
};

/// One Euler-Maruyama step: x + s * drift + sqrt(s) * noise.
Vector em_step(const Eigen::Ref<const Vector>& x, double s,
               const Eigen::Ref<const Vector>& drift,
               const Eigen::Ref<const Vector>& noise);

/// Grid time t_k = k / K, computed by division (never by accumulation).
inline double grid_time(std::size_t k, std::size_t steps) {
  return static_cast<double>(k) / static_cast<double>(steps);
}

/// Runs the diffusion sampler: every particle starts at the
/// origin and takes K Euler-Maruyama steps
///
///   Y_{k+1} = Y_k + s b(Y_k, t_k) + sqrt(s) eps_{k+1}
///
/// with its own random stream. The terminal states are the samples. The
/// output depends only on (config, seed), not on the thread count.
/// A non-finite drift throws NumericError naming particle, step and |x|.
SampleBatch sfs_run(const SamplerConfig& config);

}  // namespace sfs

#endif  // SFS_SAMPLER_HPP
