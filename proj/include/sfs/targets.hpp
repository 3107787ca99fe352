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

#ifndef SFS_TARGETS_HPP
#define SFS_TARGETS_HPP

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sfs/common.hpp"

namespace sfs {

class Rng;
class GaussianMixture;

/// Target distribution mu(x) = exp(-V(x)) / C, known through
///
///   g(x) = exp(-V(x) + |x|^2 / 2),
///
/// which is the density ratio d mu / d N(0, I) up to the constant
/// C^{-1} (2 pi)^{p/2}. Everything is expressed through log g; g itself is
/// never formed since it overflows for sub-quadratic V.
///
/// Targets are immutable after construction and safe to evaluate from many
/// threads at once.
class Target {
 public:
  virtual ~Target() = default;

  virtual std::size_t dim() const noexcept = 0;
  virtual double log_g(const Eigen::Ref<const Vector>& x) const = 0;
  virtual Vector grad_log_g(const Eigen::Ref<const Vector>& x) const = 0;

  /// Evaluates log g at every column of `points` (p x m). When `grad` is
  /// non-null it receives the p x m matrix of gradients. The default loops
  /// over columns; families with cheaper batched arithmetic override it.
  virtual void evaluate_batch(const Eigen::Ref<const Matrix>& points,
                              Eigen::Ref<Vector> log_g_out,
                              Matrix* grad) const;

  /// True when log_g is exactly log f = log(d mu / d N(0, I)), i.e. the
  /// normalizing constant is known. Required by epsilon-regularization.
  virtual bool normalization_known() const noexcept { return false; }

  /// Mixture whose closed-form drift applies to this target, if any. The
  /// drift is invariant to constant shifts of log g, so wrappers forward it.
  virtual std::shared_ptr<const GaussianMixture> closed_form() const {
    return nullptr;
  }

  virtual std::string label() const = 0;
};

using TargetPtr = std::shared_ptr<const Target>;

/// One N(mean, covariance) component with everything the density and the
/// heat-semigroup drift need, factorized once.
struct MixtureComponent {
  double weight = 0.0;
  double log_weight = 0.0;
  Vector mean;
  Matrix covariance;
  Eigen::LLT<Matrix> cholesky;
  double log_det = 0.0;
  // Spectral form covariance = basis * diag(eigenvalues) * basis^T.
  Matrix basis;
  Vector eigenvalues;
  Vector rotated_mean;  // basis^T * mean
  double mahalanobis_mean = 0.0;  // mean^T covariance^{-1} mean
};

/// sum_i theta_i N(alpha_i, Sigma_i) with full SPD covariances.
class GaussianMixture {
 public:
  /// Weights off from summing to one by at most 1e-9 are renormalized;
  /// larger deviations, negative weights, dimension mismatches and non-SPD
  /// covariances throw InvalidArgument.
  GaussianMixture(std::vector<double> weights, std::vector<Vector> means,
                  std::vector<Matrix> covariances, std::string label = {});

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return components_.size(); }
  const MixtureComponent& component(std::size_t i) const { return components_[i]; }
  const std::vector<MixtureComponent>& components() const noexcept { return components_; }
  const std::string& label() const noexcept { return label_; }

  /// Means stacked as rows (kappa x p).
  Matrix centers() const;

  /// Whether I - Sigma_i is positive definite for every component, the
  /// condition under which f and grad f are Lipschitz. Violation only adds a
  /// warning.
  bool lipschitz_condition() const noexcept { return lipschitz_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  double log_density(const Eigen::Ref<const Vector>& x) const;
  /// log f(x) = log mu(x) - log phi(x).
  double log_ratio(const Eigen::Ref<const Vector>& x) const;
  Vector grad_log_ratio(const Eigen::Ref<const Vector>& x) const;
  void log_ratio_batch(const Eigen::Ref<const Matrix>& points,
                       Eigen::Ref<Vector> out, Matrix* grad) const;

  /// Exact i.i.d. draws, one per row.
  Matrix sample(std::size_t count, Rng& rng) const;

  /// CDF of a one-dimensional mixture.
  double cdf(double x) const;

 private:
  std::size_t dim_ = 0;
  std::vector<MixtureComponent> components_;
  bool lipschitz_ = true;
  std::vector<std::string> warnings_;
  std::string label_;
};

using MixturePtr = std::shared_ptr<const GaussianMixture>;

/// Bayesian logistic regression posterior with a N(0, prior_precision^{-1})
/// prior on the coefficients.
class LogisticPosterior final : public Target {
 public:
  LogisticPosterior(Matrix design, Vector labels, Matrix prior_precision,
                    std::string label = "logistic");

  std::size_t dim() const noexcept override { return static_cast<std::size_t>(design_.cols()); }
  double log_g(const Eigen::Ref<const Vector>& beta) const override;
  Vector grad_log_g(const Eigen::Ref<const Vector>& beta) const override;
  void evaluate_batch(const Eigen::Ref<const Matrix>& points,
                      Eigen::Ref<Vector> log_g_out, Matrix* grad) const override;
  std::string label() const override { return label_; }

  /// Unnormalized log posterior, log g(beta) - |beta|^2 / 2.
  double log_posterior(const Eigen::Ref<const Vector>& beta) const;

  const Matrix& design() const noexcept { return design_; }
  const Vector& labels() const noexcept { return labels_; }
  const Matrix& prior_precision() const noexcept { return prior_precision_; }

 private:
  Matrix design_;
  Vector labels_;
  Matrix prior_precision_;
  Vector design_t_labels_;  // X^T y
  // I - prior_precision: the combined quadratic term of log g.
  Matrix quadratic_;
  std::string label_;
};

TargetPtr make_standard_gaussian(std::size_t p);

TargetPtr make_mixture_target(MixturePtr mixture);

TargetPtr make_gaussian_mixture(std::vector<double> weights,
                                std::vector<Vector> means,
                                std::vector<Matrix> covariances);

std::shared_ptr<const LogisticPosterior> make_logistic_posterior(
    Matrix design, Vector labels, Matrix prior_precision);

/// Wraps a target so that log g is shifted by `offset` (g multiplied by
/// e^offset). Gradients and the closed-form drift are forwarded unchanged.
TargetPtr shift_log_g(TargetPtr inner, double offset);

enum class Benchmark {
  kF1, kF2, kF3,
  kCircle4, kCircle8, kCircle16,
  kGrid16, kGrid25, kGrid49,
};

std::optional<Benchmark> parse_benchmark(std::string_view name);
std::string_view benchmark_name(Benchmark b);

/// Number of scenarios (values of the spread parameter) a benchmark has.
int benchmark_scenarios(Benchmark b);

/// Spread parameter of a scenario (1-based): circle 2/4/8, grid16 1/1.5/2,
/// grid25 and grid49 2/3. The one-dimensional mixtures have scenario 1 only,
/// for which 1 is returned.
double benchmark_scale(Benchmark b, int scenario);

/// The synthetic mixture benchmarks. One-dimensional ones are
/// 0.5 N(-c, 0.5^2) + 0.5 N(c, 0.5^2) with c = 2, 4, 8; two-dimensional ones
/// have uniform weights and covariance 0.03 I.
MixturePtr make_benchmark(Benchmark b, int scenario = 1);

}  // namespace sfs

#endif  // SFS_TARGETS_HPP
