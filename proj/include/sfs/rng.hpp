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

#ifndef SFS_RNG_HPP
#define SFS_RNG_HPP

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "sfs/common.hpp"

namespace sfs {

/// Stream purposes. Mixing the tag into the seed keeps e.g. the reference
/// sample of a diagnostic independent of the particle streams that share
/// the same master seed.
enum class StreamTag : std::uint64_t {
  kParticle = 1,
  kChain = 2,
  kReference = 3,
  kProjection = 4,
  kData = 5,
  kUser = 6,
};

/// Counter-based seed split: a pure function of (master, tag, index).
std::uint64_t derive_seed(std::uint64_t master, StreamTag tag,
                          std::uint64_t index) noexcept;

/// Random stream. mt19937_64 and the boost distributions are specified
/// bit-for-bit, so a given seed produces the same draws on every platform
/// (unlike std::normal_distribution).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t master, StreamTag tag, std::uint64_t index) {
    return Rng(derive_seed(master, tag, index));
  }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t next_u64() { return engine_(); }

  /// Fills in column-major order (a vector is a one-column matrix).
  void fill_normal(Eigen::Ref<Matrix> out) {
    double* data = out.data();
    if (out.innerStride() == 1 && out.outerStride() == out.rows()) {
      for (Eigen::Index i = 0; i < out.size(); ++i) data[i] = normal_(engine_);
      return;
    }
    for (Eigen::Index c = 0; c < out.cols(); ++c)
      for (Eigen::Index r = 0; r < out.rows(); ++r) out(r, c) = normal_(engine_);
  }

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
  boost::random::uniform_01<double> uniform_;
};

}  // namespace sfs

#endif  // SFS_RNG_HPP
