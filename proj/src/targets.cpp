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

#include "sfs/targets.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "sfs/rng.hpp"

namespace sfs {
namespace {

constexpr double kWeightTolerance = 1e-9;

bool is_symmetric(const Matrix& m, double rel_tol) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

std::string format_scale(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

class StandardGaussian final : public Target {
 public:
  explicit StandardGaussian(std::size_t p)
      : dim_(p),
        mixture_(std::make_shared<GaussianMixture>(
            std::vector<double>{1.0}, std::vector<Vector>{Vector::Zero(p)},
            std::vector<Matrix>{Matrix::Identity(p, p)},
            label())) {}

  std::size_t dim() const noexcept override { return dim_; }
  double log_g(const Eigen::Ref<const Vector>&) const override { return 0.0; }
  Vector grad_log_g(const Eigen::Ref<const Vector>&) const override {
    return Vector::Zero(dim_);
  }
  void evaluate_batch(const Eigen::Ref<const Matrix>& points,
                      Eigen::Ref<Vector> log_g_out,
                      Matrix* grad) const override {
    log_g_out.setZero();
    if (grad) grad->setZero(points.rows(), points.cols());
  }
  bool normalization_known() const noexcept override { return true; }
  std::shared_ptr<const GaussianMixture> closed_form() const override {
    return mixture_;
  }
  std::string label() const override {
    return "standard_gaussian(p=" + std::to_string(dim_) + ")";
  }

 private:
  std::size_t dim_;
  MixturePtr mixture_;
};

class MixtureTarget final : public Target {
 public:
  explicit MixtureTarget(MixturePtr mixture) : mixture_(std::move(mixture)) {}

  std::size_t dim() const noexcept override { return mixture_->dim(); }
  double log_g(const Eigen::Ref<const Vector>& x) const override {
    return mixture_->log_ratio(x);
  }
  Vector grad_log_g(const Eigen::Ref<const Vector>& x) const override {
    return mixture_->grad_log_ratio(x);
  }
  void evaluate_batch(const Eigen::Ref<const Matrix>& points,
                      Eigen::Ref<Vector> log_g_out,
                      Matrix* grad) const override {
    mixture_->log_ratio_batch(points, log_g_out, grad);
  }
  bool normalization_known() const noexcept override { return true; }
  std::shared_ptr<const GaussianMixture> closed_form() const override {
    return mixture_;
  }
  std::string label() const override {
    if (!mixture_->label().empty()) return mixture_->label();
    return "mixture(kappa=" + std::to_string(mixture_->size()) +
           ",p=" + std::to_string(mixture_->dim()) + ")";
  }

 private:
  MixturePtr mixture_;
};

class ShiftedTarget final : public Target {
 public:
  ShiftedTarget(TargetPtr inner, double offset)
      : inner_(std::move(inner)), offset_(offset) {}

  std::size_t dim() const noexcept override { return inner_->dim(); }
  double log_g(const Eigen::Ref<const Vector>& x) const override {
    return inner_->log_g(x) + offset_;
  }
  Vector grad_log_g(const Eigen::Ref<const Vector>& x) const override {
    return inner_->grad_log_g(x);
  }
  void evaluate_batch(const Eigen::Ref<const Matrix>& points,
                      Eigen::Ref<Vector> log_g_out,
                      Matrix* grad) const override {
    inner_->evaluate_batch(points, log_g_out, grad);
    log_g_out.array() += offset_;
  }
  // A shifted log g is no longer log f, so the constant is unknown again.
  bool normalization_known() const noexcept override { return false; }
  std::shared_ptr<const GaussianMixture> closed_form() const override {
    return inner_->closed_form();
  }
  std::string label() const override {
    return inner_->label() + "+shift(" + format_scale(offset_) + ")";
  }

 private:
  TargetPtr inner_;
  double offset_;
};

}  // namespace

void Target::evaluate_batch(const Eigen::Ref<const Matrix>& points,
                            Eigen::Ref<Vector> log_g_out, Matrix* grad) const {
  if (grad) grad->resize(points.rows(), points.cols());
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    log_g_out[j] = log_g(points.col(j));
    if (grad) grad->col(j) = grad_log_g(points.col(j));
  }
}

// ---------------------------------------------------------------------------
// GaussianMixture

GaussianMixture::GaussianMixture(std::vector<double> weights,
                                 std::vector<Vector> means,
                                 std::vector<Matrix> covariances,
                                 std::string label)
    : label_(std::move(label)) {
  const std::size_t kappa = weights.size();
  if (kappa == 0) throw InvalidArgument("mixture needs at least one component");
  if (means.size() != kappa || covariances.size() != kappa)
    throw InvalidArgument("mixture: weights, means and covariances differ in count");
  dim_ = static_cast<std::size_t>(means[0].size());
  if (dim_ == 0) throw InvalidArgument("mixture: zero-dimensional mean");

  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw InvalidArgument("mixture: weights must be finite and nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > kWeightTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "mixture: weights sum to " << total << ", off from 1 by more than "
       << kWeightTolerance;
    throw InvalidArgument(os.str());
  }

  components_.reserve(kappa);
  for (std::size_t i = 0; i < kappa; ++i) {
    const auto p = static_cast<Eigen::Index>(dim_);
    if (means[i].size() != p || covariances[i].rows() != p ||
        covariances[i].cols() != p) {
      throw InvalidArgument("mixture: component " + std::to_string(i) +
                            " has mismatched dimensions");
    }
    if (!means[i].allFinite() || !covariances[i].allFinite())
      throw InvalidArgument("mixture: component " + std::to_string(i) +
                            " has non-finite parameters");
    if (!is_symmetric(covariances[i], 1e-10))
      throw InvalidArgument("mixture: covariance " + std::to_string(i) +
                            " is not symmetric");

    MixtureComponent c;
    c.weight = weights[i] / total;
    c.log_weight = std::log(c.weight);
    c.mean = std::move(means[i]);
    c.covariance = 0.5 * (covariances[i] + covariances[i].transpose());
    c.cholesky.compute(c.covariance);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(c.covariance);
    if (c.cholesky.info() != Eigen::Success || eig.info() != Eigen::Success ||
        eig.eigenvalues().minCoeff() <= 0.0) {
      throw InvalidArgument("mixture: covariance " + std::to_string(i) +
                            " is not symmetric positive definite");
    }
    c.log_det = 2.0 * c.cholesky.matrixL().toDenseMatrix().diagonal().array().log().sum();
    c.basis = eig.eigenvectors();
    c.eigenvalues = eig.eigenvalues();
    c.rotated_mean = c.basis.transpose() * c.mean;
    c.mahalanobis_mean =
        (c.rotated_mean.array().square() / c.eigenvalues.array()).sum();
    if (c.eigenvalues.maxCoeff() >= 1.0) {
      lipschitz_ = false;
      warnings_.push_back("component " + std::to_string(i) +
                          ": I - Sigma is not positive definite; the drift "
                          "may not be Lipschitz");
    }
    components_.push_back(std::move(c));
  }
}

Matrix GaussianMixture::centers() const {
  Matrix out(components_.size(), dim_);
  for (std::size_t i = 0; i < components_.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = components_[i].mean.transpose();
  return out;
}

double GaussianMixture::log_density(const Eigen::Ref<const Vector>& x) const {
  return log_ratio(x) - 0.5 * x.squaredNorm() -
         0.5 * static_cast<double>(dim_) * std::log(2.0 * std::numbers::pi);
}

double GaussianMixture::log_ratio(const Eigen::Ref<const Vector>& x) const {
  Vector terms(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    const Vector z = c.cholesky.matrixL().solve(x - c.mean);
    terms[static_cast<Eigen::Index>(i)] =
        c.log_weight - 0.5 * c.log_det - 0.5 * z.squaredNorm();
  }
  return log_sum_exp(terms) + 0.5 * x.squaredNorm();
}

Vector GaussianMixture::grad_log_ratio(const Eigen::Ref<const Vector>& x) const {
  const auto kappa = static_cast<Eigen::Index>(components_.size());
  Vector terms(kappa);
  Matrix scores(dim_, kappa);
  for (Eigen::Index i = 0; i < kappa; ++i) {
    const auto& c = components_[static_cast<std::size_t>(i)];
    const Vector diff = x - c.mean;
    terms[i] = c.log_weight - 0.5 * c.log_det -
               0.5 * c.cholesky.matrixL().solve(diff).squaredNorm();
    scores.col(i) = -c.cholesky.solve(diff);
  }
  const Vector w = (terms.array() - log_sum_exp(terms)).exp();
  return scores * w + x;
}

void GaussianMixture::log_ratio_batch(const Eigen::Ref<const Matrix>& points,
                                      Eigen::Ref<Vector> out,
                                      Matrix* grad) const {
  const Eigen::Index m = points.cols();
  const auto kappa = static_cast<Eigen::Index>(components_.size());
  Matrix terms(kappa, m);
  std::vector<Matrix> scores;
  if (grad) scores.reserve(components_.size());
  for (Eigen::Index i = 0; i < kappa; ++i) {
    const auto& c = components_[static_cast<std::size_t>(i)];
    Matrix diff = points.colwise() - c.mean;
    c.cholesky.matrixL().solveInPlace(diff);
    terms.row(i) = (c.log_weight - 0.5 * c.log_det) -
                   0.5 * diff.colwise().squaredNorm().array();
    if (grad) {
      c.cholesky.matrixU().solveInPlace(diff);
      scores.push_back(-diff);
    }
  }
  const Eigen::RowVectorXd col_max = terms.colwise().maxCoeff();
  Matrix weights = (terms.rowwise() - col_max).array().exp().matrix();
  const Eigen::RowVectorXd sums = weights.colwise().sum();
  out = (col_max.array() + sums.array().log()).transpose().matrix() +
        0.5 * points.colwise().squaredNorm().transpose();
  if (grad) {
    grad->noalias() = points;
    for (Eigen::Index i = 0; i < kappa; ++i) {
      const Eigen::RowVectorXd w = weights.row(i).array() / sums.array();
      grad->array() += scores[static_cast<std::size_t>(i)].array().rowwise() * w.array();
    }
  }
}

Matrix GaussianMixture::sample(std::size_t count, Rng& rng) const {
  Matrix out(count, dim_);
  Vector z(dim_);
  for (std::size_t r = 0; r < count; ++r) {
    double u = rng.uniform();
    std::size_t pick = components_.size() - 1;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      if (u < components_[i].weight) {
        pick = i;
        break;
      }
      u -= components_[i].weight;
    }
    rng.fill_normal(z);
    const auto& c = components_[pick];
    out.row(static_cast<Eigen::Index>(r)) =
        (c.mean + c.cholesky.matrixL() * z).transpose();
  }
  return out;
}

double GaussianMixture::cdf(double x) const {
  if (dim_ != 1) throw InvalidArgument("cdf is defined for one-dimensional mixtures");
  double total = 0.0;
  for (const auto& c : components_) {
    const double sd = std::sqrt(c.covariance(0, 0));
    total += c.weight * 0.5 * std::erfc(-(x - c.mean[0]) / (sd * std::numbers::sqrt2));
  }
  return total;
}

// ---------------------------------------------------------------------------
// LogisticPosterior

namespace {

// Columnwise sum of softplus over a matrix of linear predictors. Uses
// log(1 + e) rather than log1p so the expression vectorizes; the absolute
// error stays at the 1e-16 level.
Eigen::RowVectorXd softplus_colsum(const Matrix& eta, Matrix* sigmoid_out) {
  const Eigen::ArrayXXd e = (-eta.array().abs()).exp();
  const Eigen::ArrayXXd one_plus = 1.0 + e;
  if (sigmoid_out) {
    const Eigen::ArrayXXd r = one_plus.inverse();
    *sigmoid_out = (eta.array() > 0.0).select(r, e * r).matrix();
  }
  return (eta.array().max(0.0) + one_plus.log()).colwise().sum().matrix();
}

}  // namespace

LogisticPosterior::LogisticPosterior(Matrix design, Vector labels,
                                     Matrix prior_precision, std::string label)
    : design_(std::move(design)),
      labels_(std::move(labels)),
      prior_precision_(std::move(prior_precision)),
      label_(std::move(label)) {
  const Eigen::Index p = design_.cols();
  if (p == 0) throw InvalidArgument("logistic: design matrix has no columns");
  if (design_.rows() != labels_.size())
    throw InvalidArgument("logistic: design has " + std::to_string(design_.rows()) +
                          " rows but there are " + std::to_string(labels_.size()) +
                          " labels");
  for (Eigen::Index i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 0.0 && labels_[i] != 1.0)
      throw InvalidArgument("logistic: label at row " + std::to_string(i + 1) +
                            " is not 0 or 1");
  }
  if (!design_.allFinite()) throw InvalidArgument("logistic: non-finite design entry");
  if (prior_precision_.rows() != p || prior_precision_.cols() != p)
    throw InvalidArgument("logistic: prior precision must be p x p");
  if (!prior_precision_.allFinite() || !is_symmetric(prior_precision_, 1e-10))
    throw InvalidArgument("logistic: prior precision is not symmetric");
  prior_precision_ = 0.5 * (prior_precision_ + prior_precision_.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(prior_precision_, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, prior_precision_.cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale)
    throw InvalidArgument("logistic: prior precision is not positive semi-definite");
  design_t_labels_ = design_.transpose() * labels_;
  quadratic_ = Matrix::Identity(p, p) - prior_precision_;
}

double LogisticPosterior::log_g(const Eigen::Ref<const Vector>& beta) const {
  const Vector eta = design_ * beta;
  const double sp = softplus_colsum(eta, nullptr)[0];
  return design_t_labels_.dot(beta) - sp + 0.5 * beta.dot(quadratic_ * beta);
}

double LogisticPosterior::log_posterior(const Eigen::Ref<const Vector>& beta) const {
  return log_g(beta) - 0.5 * beta.squaredNorm();
}

Vector LogisticPosterior::grad_log_g(const Eigen::Ref<const Vector>& beta) const {
  const Vector eta = design_ * beta;
  Matrix sig;
  softplus_colsum(eta, &sig);
  return design_t_labels_ - design_.transpose() * sig.col(0) + quadratic_ * beta;
}

void LogisticPosterior::evaluate_batch(const Eigen::Ref<const Matrix>& points,
                                       Eigen::Ref<Vector> log_g_out,
                                       Matrix* grad) const {
  // Column blocks keep the n x block temporaries cache-resident; one n x m
  // pass costs several times more for large n and m.
  constexpr Eigen::Index kBlock = 32;
  const Eigen::Index m = points.cols();
  Matrix quad;
  quad.noalias() = quadratic_ * points;
  log_g_out = (design_t_labels_.transpose() * points +
               0.5 * points.cwiseProduct(quad).colwise().sum())
                  .transpose();
  if (grad) {
    grad->noalias() = quad;
    grad->colwise() += design_t_labels_;
  }
  Matrix eta(design_.rows(), kBlock), sig;
  for (Eigen::Index c = 0; c < m; c += kBlock) {
    const Eigen::Index w = std::min(kBlock, m - c);
    eta.resize(design_.rows(), w);
    eta.noalias() = design_ * points.middleCols(c, w);
    log_g_out.segment(c, w) -= softplus_colsum(eta, grad ? &sig : nullptr).transpose();
    if (grad) grad->middleCols(c, w).noalias() -= design_.transpose() * sig;
  }
}

// ---------------------------------------------------------------------------
// Factories

TargetPtr make_standard_gaussian(std::size_t p) {
  if (p == 0) throw InvalidArgument("standard gaussian: dimension must be >= 1");
  return std::make_shared<StandardGaussian>(p);
}

TargetPtr make_mixture_target(MixturePtr mixture) {
  if (!mixture) throw InvalidArgument("mixture target: null mixture");
  return std::make_shared<MixtureTarget>(std::move(mixture));
}

TargetPtr make_gaussian_mixture(std::vector<double> weights,
                                std::vector<Vector> means,
                                std::vector<Matrix> covariances) {
  return make_mixture_target(std::make_shared<GaussianMixture>(
      std::move(weights), std::move(means), std::move(covariances)));
}

std::shared_ptr<const LogisticPosterior> make_logistic_posterior(
    Matrix design, Vector labels, Matrix prior_precision) {
  return std::make_shared<LogisticPosterior>(
      std::move(design), std::move(labels), std::move(prior_precision));
}

TargetPtr shift_log_g(TargetPtr inner, double offset) {
  if (!inner) throw InvalidArgument("shift_log_g: null target");
  return std::make_shared<ShiftedTarget>(std::move(inner), offset);
}

// ---------------------------------------------------------------------------
// Benchmarks

namespace {

struct BenchmarkInfo {
  Benchmark id;
  std::string_view name;
  std::vector<double> scales;
};

const std::vector<BenchmarkInfo>& benchmark_table() {
  static const std::vector<BenchmarkInfo> table = {
      {Benchmark::kF1, "f1", {1.0}},
      {Benchmark::kF2, "f2", {1.0}},
      {Benchmark::kF3, "f3", {1.0}},
      {Benchmark::kCircle4, "circle4", {2.0, 4.0, 8.0}},
      {Benchmark::kCircle8, "circle8", {2.0, 4.0, 8.0}},
      {Benchmark::kCircle16, "circle16", {2.0, 4.0, 8.0}},
      {Benchmark::kGrid16, "grid16", {1.0, 1.5, 2.0}},
      {Benchmark::kGrid25, "grid25", {2.0, 3.0}},
      {Benchmark::kGrid49, "grid49", {2.0, 3.0}},
  };
  return table;
}

const BenchmarkInfo& info(Benchmark b) {
  for (const auto& entry : benchmark_table())
    if (entry.id == b) return entry;
  throw InvalidArgument("unknown benchmark");
}

MixturePtr two_point_mixture(double center, std::string label) {
  return std::make_shared<GaussianMixture>(
      std::vector<double>{0.5, 0.5},
      std::vector<Vector>{Vector::Constant(1, -center), Vector::Constant(1, center)},
      std::vector<Matrix>{Matrix::Constant(1, 1, 0.25), Matrix::Constant(1, 1, 0.25)},
      std::move(label));
}

MixturePtr planar_mixture(std::vector<Vector> means, std::string label) {
  const std::size_t kappa = means.size();
  return std::make_shared<GaussianMixture>(
      std::vector<double>(kappa, 1.0 / static_cast<double>(kappa)), std::move(means),
      std::vector<Matrix>(kappa, 0.03 * Matrix::Identity(2, 2)), std::move(label));
}

MixturePtr circle(int kappa, double scale, std::string label) {
  std::vector<Vector> means;
  for (int i = 1; i <= kappa; ++i) {
    const double angle = 2.0 * (i - 1) * std::numbers::pi / kappa;
    Vector m(2);
    m << scale * std::sin(angle), scale * std::cos(angle);
    means.push_back(m);
  }
  return planar_mixture(std::move(means), std::move(label));
}

MixturePtr grid(const std::vector<double>& offsets, double scale, std::string label) {
  std::vector<Vector> means;
  for (double a : offsets) {
    for (double b : offsets) {
      Vector m(2);
      m << scale * a, scale * b;
      means.push_back(m);
    }
  }
  return planar_mixture(std::move(means), std::move(label));
}

}  // namespace

std::optional<Benchmark> parse_benchmark(std::string_view name) {
  for (const auto& entry : benchmark_table())
    if (entry.name == name) return entry.id;
  return std::nullopt;
}

std::string_view benchmark_name(Benchmark b) { return info(b).name; }

int benchmark_scenarios(Benchmark b) {
  return static_cast<int>(info(b).scales.size());
}

double benchmark_scale(Benchmark b, int scenario) {
  const auto& entry = info(b);
  if (scenario < 1 || scenario > static_cast<int>(entry.scales.size())) {
    throw InvalidArgument("benchmark " + std::string(entry.name) + " has no scenario " +
                          std::to_string(scenario) + " (valid: 1.." +
                          std::to_string(entry.scales.size()) + ")");
  }
  return entry.scales[static_cast<std::size_t>(scenario - 1)];
}

MixturePtr make_benchmark(Benchmark b, int scenario) {
  const double scale = benchmark_scale(b, scenario);
  std::string label(benchmark_name(b));
  if (benchmark_scenarios(b) > 1) label += "(lambda=" + format_scale(scale) + ")";
  switch (b) {
    case Benchmark::kF1: return two_point_mixture(2.0, label);
    case Benchmark::kF2: return two_point_mixture(4.0, label);
    case Benchmark::kF3: return two_point_mixture(8.0, label);
    case Benchmark::kCircle4: return circle(4, scale, label);
    case Benchmark::kCircle8: return circle(8, scale, label);
    case Benchmark::kCircle16: return circle(16, scale, label);
    case Benchmark::kGrid16: return grid({-3, -1, 1, 3}, scale, label);
    case Benchmark::kGrid25: return grid({-2, -1, 0, 1, 2}, scale, label);
    case Benchmark::kGrid49: return grid({-3, -2, -1, 0, 1, 2, 3}, scale, label);
  }
  throw InvalidArgument("unknown benchmark");
}

}  // namespace sfs
