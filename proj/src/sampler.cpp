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

#include "sfs/sampler.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "sfs/rng.hpp"

namespace sfs {

Vector em_step(const Eigen::Ref<const Vector>& x, double s,
               const Eigen::Ref<const Vector>& drift,
               const Eigen::Ref<const Vector>& noise) {
  return x + s * drift + std::sqrt(s) * noise;
}

SampleBatch sfs_run(const SamplerConfig& config) {
  if (config.steps == 0) throw InvalidArgument("sampler: K must be >= 1");
  if (config.particles == 0) throw InvalidArgument("sampler: N must be >= 1");
  if (config.drift.dim() == 0) throw InvalidArgument("sampler: no drift configured");
  const auto start = std::chrono::steady_clock::now();

  const std::size_t steps = config.steps;
  const double s = 1.0 / static_cast<double>(steps);
  const double root_s = std::sqrt(s);
  const std::size_t p = config.drift.dim();

  DriftEvaluator drift = config.drift;
  drift.set_time_guard(s);

  SampleBatch batch;
  batch.points.resize(static_cast<Eigen::Index>(config.particles),
                      static_cast<Eigen::Index>(p));
  if (config.record_trajectories) {
    batch.trajectory_steps = steps + 1;
    batch.trajectories.assign(config.particles * (steps + 1) * p, 0.0);
  }

  parallel_for(config.particles, config.threads, [&](std::size_t begin, std::size_t end) {
    Vector y(p), noise(p), b(p);
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t particle = config.first_particle + i;
      Rng rng = Rng::stream(config.seed, StreamTag::kParticle, particle);
      y.setZero();
      double* traj = config.record_trajectories
                         ? batch.trajectories.data() + i * (steps + 1) * p
                         : nullptr;
      for (std::size_t k = 0; k < steps; ++k) {
        rng.fill_normal(noise);
        b = drift(y, grid_time(k, steps), rng);
        if (!b.allFinite()) {
          std::ostringstream os;
          os << "non-finite drift at particle " << particle << ", step " << k
             << ", |x| = " << y.norm();
          throw NumericError(os.str());
        }
        y = y + s * b + root_s * noise;  // same rounding order as em_step
        if (traj) Eigen::Map<Vector>(traj + (k + 1) * p, p) = y;
      }
      batch.points.row(static_cast<Eigen::Index>(i)) = y.transpose();
    }
  });

  batch.meta.method = "sfs";
  batch.meta.seed = config.seed;
  batch.meta.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return batch;
}

}  // namespace sfs
