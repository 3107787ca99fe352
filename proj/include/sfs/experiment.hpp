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

// Experiment configuration, data files and the sample / compare /
// gen-logistic commands.
//
// Config files are YAML with a strict schema; any unknown key is an error
// naming the key path. See README.md for the full schema.

#ifndef SFS_EXPERIMENT_HPP
#define SFS_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sfs/baselines.hpp"
#include "sfs/diagnostics.hpp"
#include "sfs/drift.hpp"
#include "sfs/sampler.hpp"
#include "sfs/targets.hpp"

namespace sfs {

// ---------------------------------------------------------------------------
// Configuration

struct BenchmarkSpec {
  Benchmark name = Benchmark::kF1;
  int scenario = 1;
};

struct MixtureSpec {
  std::vector<double> weights;
  std::vector<Vector> means;
  std::vector<Matrix> covariances;
};

enum class PriorMode { kEmpirical, kMatrix };

struct LogisticSpec {
  std::filesystem::path data;  // resolved against the config directory
  struct Generate {
    std::size_t n = 0;
    std::size_t p = 0;
    std::uint64_t seed = 0;
  };
  std::optional<Generate> generate;  // used instead of `data` when set
  PriorMode prior = PriorMode::kEmpirical;
  Matrix prior_precision;  // for PriorMode::kMatrix
};

using TargetSpec = std::variant<BenchmarkSpec, MixtureSpec, LogisticSpec>;

enum class Method { kSfs, kUla, kRwmh };
enum class DriftChoice { kExact, kMcGradient, kMcStein };

std::string_view method_name(Method m);

struct SamplerBlock {
  std::string name;
  Method method = Method::kSfs;
  std::uint64_t seed = 0;
  // sfs
  std::size_t steps = 100;
  std::size_t particles = 1000;
  DriftChoice drift = DriftChoice::kExact;
  std::size_t mc_samples = 1000;
  std::optional<double> epsilon;
  bool record_trajectories = false;
  // ula / rwmh
  double step = 0.1;
  std::size_t iters = 10000;
  std::optional<std::size_t> burn_in;
  std::size_t thin = 1;
  std::size_t chains = 1;
  Vector init;
};

struct DiagnosticsBlock {
  bool moments = true;
  std::optional<AssignMethod> modes = AssignMethod::kNearest;
  bool wasserstein = true;
  std::size_t reference_size = 100000;
  std::size_t projections = 64;
  bool kde = false;  // always on for 1D targets in `compare`
  std::size_t kde_points = 200;
  std::uint64_t seed = 0;
};

struct OutputBlock {
  std::filesystem::path directory = ".";
  std::string prefix = "sfs";
};

enum class CommandKind { kSample, kCompare };

struct ExperimentConfig {
  TargetSpec target;
  std::vector<SamplerBlock> samplers;
  DiagnosticsBlock diagnostics;
  OutputBlock output;
  std::string hash;  // canonical content hash (see config_hash)
};

/// Parses config text. Relative paths resolve against `base_dir`. Throws
/// ConfigError naming the offending key.
ExperimentConfig parse_config(std::string_view text, CommandKind kind,
                              const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path, CommandKind kind);

/// SHA-256 (hex) of the canonical form of a YAML document: mappings with
/// sorted keys, scalars as their parsed strings. Whitespace and comment
/// edits that do not change the parsed tree leave it unchanged.
std::string config_hash(std::string_view text);

// ---------------------------------------------------------------------------
// Data files

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

/// CSV with header x1..xp and one row per sample.
std::string samples_csv(const Matrix& points);
Matrix read_samples_csv(const std::filesystem::path& path);

struct LogisticData {
  Matrix design;
  Vector labels;
};

/// Columns x1..xp,y. Throws InvalidArgument naming the row for ragged rows,
/// non-numeric cells or labels outside {0, 1}.
LogisticData read_logistic_csv(const std::filesystem::path& path);
LogisticData parse_logistic_csv(std::string_view text);
std::string logistic_csv(const LogisticData& data);

/// sum_i x_i x_i^T / n: the inverse of the empirical prior covariance,
/// used directly as the prior precision.
Matrix empirical_prior_precision(const Matrix& design);

/// Loads a logistic CSV and builds the posterior. `empirical` computes the
/// prior precision from the data and requires it to be positive definite.
std::shared_ptr<const LogisticPosterior> load_logistic_posterior(
    const std::filesystem::path& path, PriorMode prior,
    const Matrix& prior_precision = {});

/// Sigma_{ij} = rho^{|i-j|}.
Matrix ar1_covariance(std::size_t p, double rho);

struct GeneratedLogistic {
  LogisticData data;
  Vector beta;
};

/// beta ~ N(0, I_p), x_i ~ N(0, Sigma) with Sigma_{ij} = 0.5^{|i-j|},
/// y_i ~ Bernoulli(sigmoid(x_i^T beta)).
GeneratedLogistic generate_logistic(std::size_t n, std::size_t p, std::uint64_t seed);

/// Writes `content` to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// ---------------------------------------------------------------------------
// Commands

struct RunOptions {
  unsigned threads = 1;
  bool quiet = true;
  std::ostream* log = nullptr;
};

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::string version;
  std::vector<std::uint64_t> seeds;
  std::vector<std::pair<std::string, double>> timings;
  std::vector<std::filesystem::path> outputs;
  std::filesystem::path summary;
};

/// Builds the target a config describes.
TargetPtr build_target(const TargetSpec& spec);

/// Runs one sampler block against a target.
SampleBatch run_sampler(const TargetPtr& target, const SamplerBlock& block,
                        unsigned threads);

/// Computes the diagnostics a config asks for on one sample batch.
DiagnosticsReport diagnose(const Matrix& points, const TargetPtr& target,
                           const DiagnosticsBlock& cfg, bool with_kde);

RunManifest cmd_sample(const std::filesystem::path& config_path, const RunOptions& opts);
RunManifest cmd_compare(const std::filesystem::path& config_path, const RunOptions& opts);

/// Writes the data CSV to `out_path` and beta to `<out_path>.beta.json`.
RunManifest cmd_gen_logistic(std::size_t n, std::size_t p, std::uint64_t seed,
                             const std::filesystem::path& out_path);

/// Library version string.
std::string_view version();

}  // namespace sfs

#endif  // SFS_EXPERIMENT_HPP
