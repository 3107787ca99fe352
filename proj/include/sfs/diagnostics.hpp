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

#ifndef SFS_DIAGNOSTICS_HPP
#define SFS_DIAGNOSTICS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfs/common.hpp"
#include "sfs/targets.hpp"

namespace sfs {

// Sample sets are matrices with one point per row.

/// Order-d Wasserstein distance between two empirical measures on the line.
/// Equal sizes reduce to the sorted pairing (mean |a_(i) - b_(i)|^d)^{1/d};
/// unequal sizes integrate the quantile difference over the union of both
/// quantile breakpoints, which is exact for empirical measures.
double wasserstein_1d(std::span<const double> a, std::span<const double> b,
                      double order);

/// Largest instance wasserstein_exact_small accepts.
inline constexpr std::size_t kExactWassersteinMaxPoints = 512;

/// Minimum-cost perfect matching for a square cost matrix (rows to
/// columns), O(n^3) shortest augmenting paths. Returns the column assigned
/// to each row.
std::vector<std::size_t> solve_assignment(const Matrix& cost);

/// Exact transport cost between two equal-size point sets, solved as an
/// assignment problem: (mean matched |a_i - b_sigma(i)|^d)^{1/d}.
double wasserstein_exact_small(const Matrix& a, const Matrix& b, double order);

/// Sliced Wasserstein distance: random unit directions (seeded), 1D
/// distances of the projections, aggregated as a root mean of order d.
/// The result is divided by (E|theta_1|^d)^{1/d}, the d-th moment of a
/// coordinate of a uniform direction, so that a pure translation by v
/// yields |v| in every dimension (for d = 2 this factor is sqrt(p)).
/// In one dimension it coincides with wasserstein_1d.
double sliced_wasserstein(const Matrix& a, const Matrix& b, double order,
                          std::size_t projections, std::uint64_t seed);

/// E|theta_1|^d for theta uniform on the unit sphere in R^p.
double sphere_coordinate_moment(std::size_t p, double order);

enum class AssignMethod { kNearest, kKMeans };

struct ModeProportions {
  std::vector<double> frequencies;
  std::vector<std::size_t> counts;
  AssignMethod method = AssignMethod::kNearest;
  Matrix centers;                      // final centers (moved by k-means)
  std::vector<double> objective_trace; // k-means objective per iteration
  std::size_t iterations = 0;
};

/// Fraction of samples assigned to each center. `nearest` uses the given
/// centers; `kmeans` runs Lloyd iterations started at them until the
/// largest center move is below 1e-8 or 100 iterations, then assigns.
ModeProportions mode_proportions(const Matrix& samples, const Matrix& centers,
                                 AssignMethod method);

struct MomentSummary {
  Vector mean;
  Vector median;
  Vector variance;  // divisor N - 1 (0 when N == 1)
};

MomentSummary moment_summary(const Matrix& samples);

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points = 0;
};

/// Evaluation grid for kde_grid. Axes left unset span the sample range
/// widened by four bandwidths on each side.
struct GridSpec {
  std::size_t points = 200;              // per axis when axes are automatic
  std::vector<std::optional<GridAxis>> axes;
};

struct KdeGrid {
  std::vector<std::vector<double>> axes;  // grid coordinates per axis
  std::vector<double> bandwidths;         // per axis
  /// Density values; in 2D row-major over (axis0 index, axis1 index).
  std::vector<double> density;
};

/// Silverman's rule 1.06 * sigma * N^{-1/5} for one axis.
double silverman_bandwidth(std::span<const double> values);

/// Gaussian (product) kernel density estimate on a 1D or 2D grid. With no
/// bandwidth the per-axis Silverman rule is used; a zero-variance axis then
/// throws InvalidArgument.
KdeGrid kde_grid(const Matrix& samples, const GridSpec& spec,
                 std::optional<double> bandwidth = std::nullopt);

/// Trapezoid-rule integral of a KDE grid (1D or 2D).
double kde_integral(const KdeGrid& grid);

/// `count` quantiles F^{-1}((i + 1/2) / count) of a one-dimensional
/// mixture: a deterministic stand-in for a sample of the true law.
Vector mixture_quantiles(const GaussianMixture& mix, std::size_t count);

struct WassersteinEntry {
  double order = 1.0;
  std::string method;
  std::string reference;
  double value = 0.0;
};

struct DiagnosticsReport {
  std::optional<MomentSummary> moments;
  std::vector<WassersteinEntry> wasserstein;
  std::optional<ModeProportions> modes;
  std::optional<KdeGrid> kde;
};

}  // namespace sfs

#endif  // SFS_DIAGNOSTICS_HPP
