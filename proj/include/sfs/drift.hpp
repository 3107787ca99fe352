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

// Schrodinger-Follmer drift
//
//   b(x, t) = E[grad f(x + sqrt(1-t) Z)] / E[f(x + sqrt(1-t) Z)],
//
// Z ~ N(0, I), i.e. the gradient of log Q_{1-t} f where Q is the heat
// semigroup. Three evaluation routes are provided:
//
//  * closed form for Gaussian mixtures,
//  * Monte Carlo with m standard normal draws, either in gradient form
//    (needs grad log g) or in Stein form (uses Z * g, gradient free),
//  * epsilon-regularized: the drift of f_eps = (1 - eps) f + eps, for
//    targets whose normalizing constant is known.
//
// Monte Carlo ratios are computed as self-normalized softmax weights of
// log g, so no g value is ever exponentiated on its own.

#ifndef SFS_DRIFT_HPP
#define SFS_DRIFT_HPP

#include <memory>
#include <string>
#include <variant>

#include "sfs/common.hpp"
#include "sfs/rng.hpp"
#include "sfs/targets.hpp"

namespace sfs {

enum class DriftForm { kGradient, kStein };

/// Drift vector together with log Q_{1-t} f(x) (or, for Monte Carlo, its
/// log-mean-exp estimate). The log value is exact only when the target's
/// normalization is known.
struct DriftValue {
  Vector drift;
  double log_heat = 0.0;
};

/// Closed-form mixture drift. Per component, with P = Sigma^{-1},
/// M = t I + (1-t) P and u = (1-t) P alpha + x:
///
///   v_i    = P alpha + (I - P) M^{-1} u
///   log w_i = log theta_i + log g_i(x, t) - 1/2 log|t Sigma + (1-t) I|
///
/// and b = sum_i softmax(log w)_i v_i. Everything is done in the
/// eigenbasis of Sigma_i, where M is diagonal; the exponent of g_i is
/// rearranged so the 1/(1-t) factor cancels analytically, which keeps it
/// finite up to and including t = 1.
DriftValue exact_mixture_drift_value(const GaussianMixture& mix,
                                     const Eigen::Ref<const Vector>& x, double t);
Vector exact_mixture_drift(const GaussianMixture& mix,
                           const Eigen::Ref<const Vector>& x, double t);

/// Gradient-form estimator: sum_j softmax(log g(Y_j)) grad log g(Y_j) with
/// Y_j = x + sqrt(1-t) Z_j.
DriftValue mc_drift_gradient_value(const Target& target,
                                   const Eigen::Ref<const Vector>& x, double t,
                                   std::size_t samples, Rng& rng);
Vector mc_drift_gradient_form(const Target& target,
                              const Eigen::Ref<const Vector>& x, double t,
                              std::size_t samples, Rng& rng);

/// Stein-form estimator: sum_j softmax(log g(Y_j)) Z_j / sqrt(1-t).
/// `time_guard` is the smallest admissible 1 - t; anything closer to 1
/// throws, naming the sqrt(1-t) singularity.
DriftValue mc_drift_stein_value(const Target& target,
                                const Eigen::Ref<const Vector>& x, double t,
                                std::size_t samples, Rng& rng, double time_guard);
Vector mc_drift_stein_form(const Target& target,
                           const Eigen::Ref<const Vector>& x, double t,
                           std::size_t samples, Rng& rng, double time_guard);

/// Drift of (1 - eps) f + eps given the unregularized drift b and log Q f:
/// b * (1 - eps) Qf / ((1 - eps) Qf + eps), computed as a logistic factor.
Vector regularize_drift(const DriftValue& inner, double epsilon);

/// Strategy object mapping (x, t) to a drift vector.
class DriftEvaluator {
 public:
  struct Exact {
    MixturePtr mixture;
  };
  struct MonteCarlo {
    TargetPtr target;
    std::size_t samples = 0;
    DriftForm form = DriftForm::kGradient;
  };
  struct Regularized {
    double epsilon = 0.0;
    std::shared_ptr<const DriftEvaluator> inner;
  };

  /// Empty evaluator (dimension 0); samplers reject it.
  DriftEvaluator() = default;

  static DriftEvaluator exact(MixturePtr mixture);
  static DriftEvaluator monte_carlo(TargetPtr target, std::size_t samples,
                                    DriftForm form);
  /// The inner evaluator must be an exact mixture drift or a Monte Carlo
  /// drift over a normalization-known target; 0 < epsilon < 1.
  static DriftEvaluator regularized(double epsilon, DriftEvaluator inner);

  std::size_t dim() const noexcept { return dim_; }
  bool is_random() const noexcept;
  std::string describe() const;
  const std::variant<Exact, MonteCarlo, Regularized>& strategy() const noexcept {
    return strategy_;
  }

  /// Smallest admissible 1 - t for the Stein form. Samplers set it to their
  /// step size; the default only excludes t >= 1.
  void set_time_guard(double guard);
  double time_guard() const noexcept { return time_guard_; }

  Vector operator()(const Eigen::Ref<const Vector>& x, double t, Rng& rng) const;
  DriftValue evaluate(const Eigen::Ref<const Vector>& x, double t, Rng& rng) const;

 private:
  DriftEvaluator(std::variant<Exact, MonteCarlo, Regularized> s, std::size_t dim)
      : strategy_(std::move(s)), dim_(dim) {}

  std::variant<Exact, MonteCarlo, Regularized> strategy_;
  std::size_t dim_ = 0;
  double time_guard_ = 0.0;
};

}  // namespace sfs

#endif  // SFS_DRIFT_HPP
