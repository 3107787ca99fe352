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

#include "sfs/drift.hpp"

#include <cmath>
#include <sstream>

namespace sfs {
namespace {

void check_point(std::size_t dim, const Eigen::Ref<const Vector>& x, double t) {
  if (static_cast<std::size_t>(x.size()) != dim)
    throw InvalidArgument("drift: point has dimension " + std::to_string(x.size()) +
                          ", expected " + std::to_string(dim));
  if (!(t >= 0.0) || !(t < 1.0)) {
    std::ostringstream os;
    os << "drift: time t = " << t << " outside [0, 1)";
    throw InvalidArgument(os.str());
  }
}

// Shared Monte Carlo step: draws Z (p x m), evaluates log g at x + c Z and
// turns the values into normalized softmax weights. Returns log-mean-exp.
double draw_and_weight(const Target& target, const Eigen::Ref<const Vector>& x,
                       double c, std::size_t samples, Rng& rng, Matrix& z,
                       Vector& weights, Matrix* grad) {
  if (samples == 0) throw InvalidArgument("Monte Carlo drift needs m >= 1 samples");
  const auto p = static_cast<Eigen::Index>(target.dim());
  const auto m = static_cast<Eigen::Index>(samples);
  z.resize(p, m);
  rng.fill_normal(z);
  Matrix points = (c * z).colwise() + x;
  weights.resize(m);
  target.evaluate_batch(points, weights, grad);
  const double top = weights.maxCoeff();
  weights = (weights.array() - top).exp();
  const double total = weights.sum();
  weights /= total;
  return top + std::log(total) - std::log(static_cast<double>(samples));
}

}  // namespace

DriftValue exact_mixture_drift_value(const GaussianMixture& mix,
                                     const Eigen::Ref<const Vector>& x, double t) {
  check_point(mix.dim(), x, t);
  const auto p = static_cast<Eigen::Index>(mix.dim());
  const auto kappa = static_cast<Eigen::Index>(mix.size());
  const double rest = 1.0 - t;

  Vector log_w(kappa);
  Matrix v(p, kappa);
  Vector xr(p), ur(p), vr(p);
  for (Eigen::Index i = 0; i < kappa; ++i) {
    const auto& c = mix.component(static_cast<std::size_t>(i));
    const auto& lam = c.eigenvalues;
    const auto& ar = c.rotated_mean;
    xr.noalias() = c.basis.transpose() * x;
    double exponent = -0.5 * c.mahalanobis_mean;
    double half_log_det = 0.0;
    for (Eigen::Index k = 0; k < p; ++k) {
      const double inv = 1.0 / lam[k];
      const double d = t + rest * inv;  // eigenvalue of t I + (1-t) P
      exponent += (rest * ar[k] * ar[k] * inv * inv + 2.0 * ar[k] * xr[k] * inv -
                   (inv - 1.0) * xr[k] * xr[k]) /
                  (2.0 * d);
      half_log_det += 0.5 * std::log(t * lam[k] + rest);
      ur[k] = rest * ar[k] * inv + xr[k];
      vr[k] = ar[k] * inv + (1.0 - inv) * (ur[k] / d);
    }
    log_w[i] = c.log_weight + exponent - half_log_det;
    v.col(i).noalias() = c.basis * vr;
  }
  DriftValue out;
  out.log_heat = log_sum_exp(log_w);
  const Vector w = (log_w.array() - out.log_heat).exp();
  out.drift.noalias() = v * w;
  return out;
}

Vector exact_mixture_drift(const GaussianMixture& mix,
                           const Eigen::Ref<const Vector>& x, double t) {
  return exact_mixture_drift_value(mix, x, t).drift;
}

DriftValue mc_drift_gradient_value(const Target& target,
                                   const Eigen::Ref<const Vector>& x, double t,
                                   std::size_t samples, Rng& rng) {
  check_point(target.dim(), x, t);
  Matrix z, grad;
  Vector w;
  DriftValue out;
  out.log_heat = draw_and_weight(target, x, std::sqrt(1.0 - t), samples, rng, z, w, &grad);
  out.drift.noalias() = grad * w;
  return out;
}

Vector mc_drift_gradient_form(const Target& target,
                              const Eigen::Ref<const Vector>& x, double t,
                              std::size_t samples, Rng& rng) {
  return mc_drift_gradient_value(target, x, t, samples, rng).drift;
}

DriftValue mc_drift_stein_value(const Target& target,
                                const Eigen::Ref<const Vector>& x, double t,
                                std::size_t samples, Rng& rng, double time_guard) {
  check_point(target.dim(), x, t);
  const double rest = 1.0 - t;
  // Grid points k/K are compared against a guard of 1/K, so allow for the
  // rounding of 1 - k/K.
  if (rest < time_guard * (1.0 - 1e-9)) {
    std::ostringstream os;
    os << "Stein-form drift: t = " << t << " is within " << time_guard
       << " of 1, where the 1/sqrt(1-t) factor is singular";
    throw InvalidArgument(os.str());
  }
  const double c = std::sqrt(rest);
  Matrix z;
  Vector w;
  DriftValue out;
  out.log_heat = draw_and_weight(target, x, c, samples, rng, z, w, nullptr);
  out.drift.noalias() = z * w;
  out.drift /= c;
  return out;
}

Vector mc_drift_stein_form(const Target& target,
                           const Eigen::Ref<const Vector>& x, double t,
                           std::size_t samples, Rng& rng, double time_guard) {
  return mc_drift_stein_value(target, x, t, samples, rng, time_guard).drift;
}

Vector regularize_drift(const DriftValue& inner, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw InvalidArgument("regularization epsilon must lie in (0, 1)");
  // (1-eps) Qf / ((1-eps) Qf + eps) = sigmoid(log(1-eps) + log Qf - log eps)
  const double logit = std::log1p(-epsilon) + inner.log_heat - std::log(epsilon);
  return inner.drift * sigmoid(logit);
}

// ---------------------------------------------------------------------------

DriftEvaluator DriftEvaluator::exact(MixturePtr mixture) {
  if (!mixture) throw InvalidArgument("exact drift: null mixture");
  const std::size_t dim = mixture->dim();
  return DriftEvaluator(Exact{std::move(mixture)}, dim);
}

DriftEvaluator DriftEvaluator::monte_carlo(TargetPtr target, std::size_t samples,
                                           DriftForm form) {
  if (!target) throw InvalidArgument("Monte Carlo drift: null target");
  if (samples == 0) throw InvalidArgument("Monte Carlo drift needs m >= 1 samples");
  const std::size_t dim = target->dim();
  return DriftEvaluator(MonteCarlo{std::move(target), samples, form}, dim);
}

DriftEvaluator DriftEvaluator::regularized(double epsilon, DriftEvaluator inner) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw InvalidArgument("regularization epsilon must lie in (0, 1)");
  if (std::holds_alternative<Regularized>(inner.strategy_))
    throw InvalidArgument("regularized drift cannot wrap another regularized drift");
  if (const auto* mc = std::get_if<MonteCarlo>(&inner.strategy_)) {
    if (!mc->target->normalization_known())
      throw InvalidArgument(
          "regularized drift requires a target with known normalization; '" +
          mc->target->label() + "' is unnormalized");
  }
  const std::size_t dim = inner.dim_;
  const double guard = inner.time_guard_;
  DriftEvaluator out(
      Regularized{epsilon, std::make_shared<const DriftEvaluator>(std::move(inner))}, dim);
  out.time_guard_ = guard;
  return out;
}

bool DriftEvaluator::is_random() const noexcept {
  if (std::holds_alternative<MonteCarlo>(strategy_)) return true;
  if (const auto* r = std::get_if<Regularized>(&strategy_)) return r->inner->is_random();
  return false;
}

std::string DriftEvaluator::describe() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Exact>) {
          os << "exact";
        } else if constexpr (std::is_same_v<S, MonteCarlo>) {
          os << (s.form == DriftForm::kGradient ? "mc-gradient" : "mc-stein")
             << "(m=" << s.samples << ")";
        } else {
          os << "regularized(eps=" << s.epsilon << "," << s.inner->describe() << ")";
        }
      },
      strategy_);
  return os.str();
}

void DriftEvaluator::set_time_guard(double guard) {
  if (!(guard >= 0.0 && guard <= 1.0))
    throw InvalidArgument("drift time guard must lie in [0, 1]");
  time_guard_ = guard;
  if (auto* r = std::get_if<Regularized>(&strategy_)) {
    auto inner = std::make_shared<DriftEvaluator>(*r->inner);
    inner->set_time_guard(guard);
    r->inner = std::move(inner);
  }
}

DriftValue DriftEvaluator::evaluate(const Eigen::Ref<const Vector>& x, double t,
                                    Rng& rng) const {
  return std::visit(
      [&](const auto& s) -> DriftValue {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Exact>) {
          return exact_mixture_drift_value(*s.mixture, x, t);
        } else if constexpr (std::is_same_v<S, MonteCarlo>) {
          if (s.form == DriftForm::kGradient)
            return mc_drift_gradient_value(*s.target, x, t, s.samples, rng);
          return mc_drift_stein_value(*s.target, x, t, s.samples, rng, time_guard_);
        } else {
          DriftValue inner = s.inner->evaluate(x, t, rng);
          inner.drift = regularize_drift(inner, s.epsilon);
          // log Q f_eps = log((1-eps) Qf + eps)
          const double a = std::log1p(-s.epsilon) + inner.log_heat;
          const double b = std::log(s.epsilon);
          const double hi = std::max(a, b);
          inner.log_heat = hi + std::log(std::exp(a - hi) + std::exp(b - hi));
          return inner;
        }
      },
      strategy_);
}

Vector DriftEvaluator::operator()(const Eigen::Ref<const Vector>& x, double t,
                                  Rng& rng) const {
  return evaluate(x, t, rng).drift;
}

}  // namespace sfs
