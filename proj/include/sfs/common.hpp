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

#ifndef SFS_COMMON_HPP
#define SFS_COMMON_HPP

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sfs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed argument to a library call (bad dimension, bad weight, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration rejected. `key()` names the offending key path.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& message)
      : Error(key.empty() ? message : "config key '" + key + "': " + message),
        key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// A computation produced non-finite values and was aborted.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Numerically stable log(1 + exp(u)).
inline double softplus(double u) {
  return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

/// Logistic sigmoid without overflow for large |u|.
inline double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

/// log(sum(exp(v))) with max subtraction. Returns -inf for an empty or
/// all -inf input.
double log_sum_exp(const Eigen::Ref<const Vector>& v);

/// Runs fn(begin, end) over [0, count) split into contiguous chunks across
/// `threads` workers (0 = hardware concurrency). The first exception thrown
/// by the lowest-indexed chunk is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

/// Resolves a requested worker count: 0 means hardware concurrency.
unsigned resolve_threads(unsigned requested);

}  // namespace sfs

#endif  // SFS_COMMON_HPP
