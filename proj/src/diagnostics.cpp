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

#include "sfs/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sfs/rng.hpp"

namespace sfs {
namespace {

void check_order(double order) {
  if (!(order >= 1.0) || !std::isfinite(order))
    throw InvalidArgument("Wasserstein order must be a finite number >= 1");
}

double power_cost(double distance, double order) {
  return order == 1.0 ? distance : order == 2.0 ? distance * distance
                                                : std::pow(distance, order);
}

double sorted_wasserstein_power(const std::vector<double>& a,
                                const std::vector<double>& b, double order) {
  const std::size_t na = a.size(), nb = b.size();
  if (na == nb) {
    double total = 0.0;
    for (std::size_t i = 0; i < na; ++i) total += power_cost(std::abs(a[i] - b[i]), order);
    return total / static_cast<double>(na);
  }
  // Walk the merged quantile breakpoints i/na and j/nb in integer units of
  // 1/(na nb) so the segment lengths are exact.
  std::size_t i = 0, j = 0;
  std::uint64_t prev = 0;
  double total = 0.0;
  while (i < na && j < nb) {
    const std::uint64_t next_a = (i + 1) * static_cast<std::uint64_t>(nb);
    const std::uint64_t next_b = (j + 1) * static_cast<std::uint64_t>(na);
    const std::uint64_t next = std::min(next_a, next_b);
    total += static_cast<double>(next - prev) * power_cost(std::abs(a[i] - b[j]), order);
    prev = next;
    if (next_a == next) ++i;
    if (next_b == next) ++j;
  }
  return total / (static_cast<double>(na) * static_cast<double>(nb));
}

std::vector<double> column_values(const Matrix& m, Eigen::Index col) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) out[static_cast<std::size_t>(r)] = m(r, col);
  return out;
}

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

std::size_t nearest_center(const Eigen::Ref<const Eigen::RowVectorXd>& x,
                           const Matrix& centers, double* dist2) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    const double d = (centers.row(c) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(c);
    }
  }
  if (dist2) *dist2 = best_d;
  return best;
}

}  // namespace

double wasserstein_1d(std::span<const double> a, std::span<const double> b,
                      double order) {
  check_order(order);
  if (a.empty() || b.empty()) throw InvalidArgument("wasserstein_1d: empty sample");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double power = sorted_wasserstein_power(sa, sb, order);
  return order == 1.0 ? power : std::pow(power, 1.0 / order);
}

double wasserstein_exact_small(const Matrix& a, const Matrix& b, double order) {
  check_order(order);
  if (a.rows() == 0 || b.rows() == 0)
    throw InvalidArgument("wasserstein_exact_small: empty sample");
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidArgument("wasserstein_exact_small: samples must have equal shape");
  const auto n = static_cast<std::size_t>(a.rows());
  if (n > kExactWassersteinMaxPoints)
    throw InvalidArgument("wasserstein_exact_small: " + std::to_string(n) +
                          " points exceeds the cap of " +
                          std::to_string(kExactWassersteinMaxPoints));
  Matrix cost(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      cost(i, j) = power_cost((a.row(i) - b.row(j)).norm(), order);
  const auto match = solve_assignment(cost);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    total += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(match[i]));
  total /= static_cast<double>(n);
  return order == 1.0 ? total : std::pow(total, 1.0 / order);
}

double sphere_coordinate_moment(std::size_t p, double order) {
  const double dp = static_cast<double>(p);
  return std::exp(std::lgamma(0.5 * (order + 1.0)) + std::lgamma(0.5 * dp) -
                  0.5 * std::log(std::numbers::pi) - std::lgamma(0.5 * (dp + order)));
}

double sliced_wasserstein(const Matrix& a, const Matrix& b, double order,
                          std::size_t projections, std::uint64_t seed) {
  check_order(order);
  if (projections == 0) throw InvalidArgument("sliced_wasserstein: need >= 1 projection");
  if (a.rows() == 0 || b.rows() == 0) throw InvalidArgument("sliced_wasserstein: empty sample");
  if (a.cols() != b.cols()) throw InvalidArgument("sliced_wasserstein: dimension mismatch");
  const auto p = static_cast<std::size_t>(a.cols());
  if (p == 1) {
    // Every unit direction is +-1, which leaves the 1D distance unchanged.
    return wasserstein_1d({a.data(), static_cast<std::size_t>(a.rows())},
                          {b.data(), static_cast<std::size_t>(b.rows())}, order);
  }
  Rng rng = Rng::stream(seed, StreamTag::kProjection, 0);
  Vector dir(a.cols());
  double total = 0.0;
  for (std::size_t k = 0; k < projections; ++k) {
    do {
      rng.fill_normal(dir);
    } while (dir.norm() == 0.0);
    dir.normalize();
    const Vector pa = a * dir, pb = b * dir;
    std::vector<double> sa(pa.data(), pa.data() + pa.size());
    std::vector<double> sb(pb.data(), pb.data() + pb.size());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    total += sorted_wasserstein_power(sa, sb, order);
  }
  const double mean_power =
      total / static_cast<double>(projections) / sphere_coordinate_moment(p, order);
  return std::pow(mean_power, 1.0 / order);
}

ModeProportions mode_proportions(const Matrix& samples, const Matrix& centers,
                                 AssignMethod method) {
  if (samples.rows() == 0) throw InvalidArgument("mode_proportions: empty samples");
  if (centers.rows() == 0) throw InvalidArgument("mode_proportions: need >= 1 center");
  if (centers.cols() != samples.cols())
    throw InvalidArgument("mode_proportions: centers and samples differ in dimension");
  const auto kappa = static_cast<std::size_t>(centers.rows());
  const auto n = static_cast<std::size_t>(samples.rows());

  ModeProportions out;
  out.method = method;
  out.centers = centers;
  std::vector<std::size_t> label(n);

  auto assign = [&](const Matrix& c) {
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d = 0.0;
      label[i] = nearest_center(samples.row(static_cast<Eigen::Index>(i)), c, &d);
      objective += d;
    }
    return objective;
  };

  if (method == AssignMethod::kKMeans) {
    constexpr std::size_t kMaxIterations = 100;
    constexpr double kTolerance = 1e-8;
    for (std::size_t it = 0; it < kMaxIterations; ++it) {
      out.objective_trace.push_back(assign(out.centers));
      Matrix sums = Matrix::Zero(centers.rows(), centers.cols());
      std::vector<std::size_t> counts(kappa, 0);
      for (std::size_t i = 0; i < n; ++i) {
        sums.row(static_cast<Eigen::Index>(label[i])) +=
            samples.row(static_cast<Eigen::Index>(i));
        ++counts[label[i]];
      }
      double moved = 0.0;
      for (std::size_t c = 0; c < kappa; ++c) {
        if (counts[c] == 0) continue;  // empty cluster keeps its center
        const auto row = static_cast<Eigen::Index>(c);
        const Eigen::RowVectorXd updated = sums.row(row) / static_cast<double>(counts[c]);
        moved = std::max(moved, (updated - out.centers.row(row)).norm());
        out.centers.row(row) = updated;
      }
      out.iterations = it + 1;
      if (moved < kTolerance) break;
    }
    out.objective_trace.push_back(assign(out.centers));
  } else {
    assign(out.centers);
  }

  out.counts.assign(kappa, 0);
  for (auto l : label) ++out.counts[l];
  out.frequencies.resize(kappa);
  for (std::size_t c = 0; c < kappa; ++c)
    out.frequencies[c] = static_cast<double>(out.counts[c]) / static_cast<double>(n);
  return out;
}

MomentSummary moment_summary(const Matrix& samples) {
  if (samples.rows() == 0) throw InvalidArgument("moment_summary: empty samples");
  const Eigen::Index n = samples.rows();
  MomentSummary out;
  out.mean = samples.colwise().mean().transpose();
  out.variance.resize(samples.cols());
  out.median.resize(samples.cols());
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    const double ss = (samples.col(j).array() - out.mean[j]).square().sum();
    out.variance[j] = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
    out.median[j] = median_of(column_values(samples, j));
  }
  return out;
}

double silverman_bandwidth(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
}

KdeGrid kde_grid(const Matrix& samples, const GridSpec& spec,
                 std::optional<double> bandwidth) {
  const auto n = static_cast<std::size_t>(samples.rows());
  const auto p = static_cast<std::size_t>(samples.cols());
  if (n == 0) throw InvalidArgument("kde: empty samples");
  if (p != 1 && p != 2) throw InvalidArgument("kde: only 1D and 2D samples are supported");
  if (!spec.axes.empty() && spec.axes.size() != p)
    throw InvalidArgument("kde: grid spec has the wrong number of axes");
  if (bandwidth && !(*bandwidth > 0.0)) throw InvalidArgument("kde: bandwidth must be positive");

  KdeGrid out;
  std::vector<std::vector<double>> cols(p);
  for (std::size_t d = 0; d < p; ++d) {
    cols[d] = column_values(samples, static_cast<Eigen::Index>(d));
    double h = bandwidth ? *bandwidth : silverman_bandwidth(cols[d]);
    if (!(h > 0.0))
      throw InvalidArgument("kde: axis " + std::to_string(d) +
                            " has zero variance; automatic bandwidth is undefined");
    out.bandwidths.push_back(h);

    GridAxis axis;
    if (!spec.axes.empty() && spec.axes[d]) {
      axis = *spec.axes[d];
    } else {
      const auto [lo, hi] = std::minmax_element(cols[d].begin(), cols[d].end());
      axis = GridAxis{*lo - 4.0 * h, *hi + 4.0 * h, spec.points};
    }
    if (axis.points < 2 || !(axis.hi > axis.lo))
      throw InvalidArgument("kde: grid axes need >= 2 points and hi > lo");
    std::vector<double> coords(axis.points);
    for (std::size_t k = 0; k < axis.points; ++k)
      coords[k] = axis.lo + (axis.hi - axis.lo) * static_cast<double>(k) /
                                static_cast<double>(axis.points - 1);
    out.axes.push_back(std::move(coords));
  }

  constexpr double kCutoff = 8.0;  // kernel mass beyond 8 bandwidths is < 1e-15
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  if (p == 1) {
    std::vector<double> sorted = cols[0];
    std::sort(sorted.begin(), sorted.end());
    const double h = out.bandwidths[0];
    const double norm = inv_sqrt_2pi / (h * static_cast<double>(n));
    out.density.resize(out.axes[0].size());
    for (std::size_t k = 0; k < out.axes[0].size(); ++k) {
      const double g = out.axes[0][k];
      auto it = std::lower_bound(sorted.begin(), sorted.end(), g - kCutoff * h);
      double sum = 0.0;
      for (; it != sorted.end() && *it <= g + kCutoff * h; ++it) {
        const double z = (g - *it) / h;
        sum += std::exp(-0.5 * z * z);
      }
      out.density[k] = sum * norm;
    }
    return out;
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return cols[0][l] < cols[0][r]; });
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = cols[0][order[i]];
    ys[i] = cols[1][order[i]];
  }
  const double hx = out.bandwidths[0], hy = out.bandwidths[1];
  const double norm = 1.0 / (2.0 * std::numbers::pi * hx * hy * static_cast<double>(n));
  const std::size_t nx = out.axes[0].size(), ny = out.axes[1].size();
  out.density.assign(nx * ny, 0.0);
  std::vector<double> ky(ny);
  for (std::size_t a = 0; a < nx; ++a) {
    const double gx = out.axes[0][a];
    const auto first = static_cast<std::size_t>(
        std::lower_bound(xs.begin(), xs.end(), gx - kCutoff * hx) - xs.begin());
    for (std::size_t i = first; i < n && xs[i] <= gx + kCutoff * hx; ++i) {
      const double zx = (gx - xs[i]) / hx;
      const double kx = std::exp(-0.5 * zx * zx);
      for (std::size_t b = 0; b < ny; ++b) {
        const double zy = (out.axes[1][b] - ys[i]) / hy;
        if (std::abs(zy) > kCutoff) continue;
        out.density[a * ny + b] += kx * std::exp(-0.5 * zy * zy);
      }
    }
    for (std::size_t b = 0; b < ny; ++b) out.density[a * ny + b] *= norm;
  }
  return out;
}

double kde_integral(const KdeGrid& grid) {
  auto weights = [](const std::vector<double>& axis) {
    std::vector<double> w(axis.size(), 0.0);
    for (std::size_t k = 0; k + 1 < axis.size(); ++k) {
      const double half = 0.5 * (axis[k + 1] - axis[k]);
      w[k] += half;
      w[k + 1] += half;
    }
    return w;
  };
  if (grid.axes.size() == 1) {
    const auto w = weights(grid.axes[0]);
    double total = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) total += w[k] * grid.density[k];
    return total;
  }
  const auto wx = weights(grid.axes[0]);
  const auto wy = weights(grid.axes[1]);
  double total = 0.0;
  for (std::size_t a = 0; a < wx.size(); ++a)
    for (std::size_t b = 0; b < wy.size(); ++b)
      total += wx[a] * wy[b] * grid.density[a * wy.size() + b];
  return total;
}

Vector mixture_quantiles(const GaussianMixture& mix, std::size_t count) {
  if (mix.dim() != 1) throw InvalidArgument("mixture_quantiles: mixture must be 1D");
  if (count == 0) throw InvalidArgument("mixture_quantiles: count must be >= 1");
  double lo_all = std::numeric_limits<double>::infinity();
  double hi_all = -lo_all;
  for (const auto& c : mix.components()) {
    const double sd = std::sqrt(c.covariance(0, 0));
    lo_all = std::min(lo_all, c.mean[0] - 40.0 * sd);
    hi_all = std::max(hi_all, c.mean[0] + 40.0 * sd);
  }
  auto pdf = [&](double x) {
    double total = 0.0;
    for (const auto& c : mix.components()) {
      const double var = c.covariance(0, 0);
      const double z = x - c.mean[0];
      total += c.weight * std::exp(-0.5 * z * z / var) /
               std::sqrt(2.0 * std::numbers::pi * var);
    }
    return total;
  };

  Vector out(static_cast<Eigen::Index>(count));
  double lower = lo_all;
  for (std::size_t i = 0; i < count; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
    // Safeguarded Newton on F(x) = u inside a shrinking bracket.
    double lo = lower, hi = hi_all;
    double x = i == 0 ? 0.5 * (lo + hi) : lower;
    for (int it = 0; it < 200; ++it) {
      const double f = mix.cdf(x) - u;
      if (f == 0.0) {
        lo = hi = x;
        break;
      }
      if (f < 0.0) lo = x; else hi = x;
      if (hi - lo <= 1e-13 * std::max(1.0, std::abs(x))) break;
      const double d = pdf(x);
      double next = d > 0.0 ? x - f / d : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      x = next;
    }
    out[static_cast<Eigen::Index>(i)] = x;
    lower = lo;
  }
  return out;
}

}  // namespace sfs
