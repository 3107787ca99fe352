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

#include <chrono>
#include <ostream>

#include <json.hpp>

#include "sfs/experiment.hpp"
#include "sfs/rng.hpp"

namespace sfs {
namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void note(const RunOptions& opts, const std::string& line) {
  if (!opts.quiet && opts.log) *opts.log << line << '\n' << std::flush;
}

Json vector_json(const Vector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_json(m.row(i).transpose()));
  return rows;
}

std::string_view drift_name(DriftChoice d) {
  switch (d) {
    case DriftChoice::kExact: return "exact";
    case DriftChoice::kMcGradient: return "mc-gradient";
    case DriftChoice::kMcStein: return "mc-stein";
  }
  return "?";
}

Json sampler_json(const SamplerBlock& block, const SampleBatch& batch) {
  Json j;
  j["name"] = block.name;
  j["method"] = method_name(block.method);
  j["seed"] = block.seed;
  if (block.method == Method::kSfs) {
    j["steps"] = block.steps;
    j["particles"] = block.particles;
    j["drift"] = drift_name(block.drift);
    if (block.drift != DriftChoice::kExact) j["mc_samples"] = block.mc_samples;
    if (block.epsilon) j["epsilon"] = *block.epsilon;
  } else {
    j["step"] = block.step;
    j["iters"] = block.iters;
    j["burn_in"] = block.burn_in.value_or(block.iters / 5);
    j["thin"] = block.thin;
    j["chains"] = block.chains;
  }
  j["samples"] = batch.size();
  j["wall_seconds"] = batch.meta.wall_seconds;
  if (batch.meta.acceptance_rate) j["acceptance_rate"] = *batch.meta.acceptance_rate;
  return j;
}

Json report_json(const DiagnosticsReport& r) {
  Json j = Json::object();
  if (r.moments) {
    j["moments"] = {{"mean", vector_json(r.moments->mean)},
                    {"median", vector_json(r.moments->median)},
                    {"variance", vector_json(r.moments->variance)}};
  }
  if (!r.wasserstein.empty()) {
    Json arr = Json::array();
    for (const auto& w : r.wasserstein)
      arr.push_back({{"order", w.order}, {"method", w.method},
                     {"reference", w.reference}, {"value", w.value}});
    j["wasserstein"] = arr;
  }
  if (r.modes) {
    j["modes"] = {{"method", r.modes->method == AssignMethod::kKMeans ? "kmeans" : "nearest"},
                  {"frequencies", r.modes->frequencies},
                  {"counts", r.modes->counts},
                  {"iterations", r.modes->iterations}};
    if (r.modes->method == AssignMethod::kKMeans)
      j["modes"]["centers"] = matrix_json(r.modes->centers);
  }
  if (r.kde) {
    j["kde"] = {{"axes", r.kde->axes},
                {"bandwidths", r.kde->bandwidths},
                {"density", r.kde->density}};
  }
  return j;
}

Json target_json(const TargetSpec& spec, const Target& target) {
  Json j;
  j["label"] = target.label();
  j["dim"] = target.dim();
  if (const auto* b = std::get_if<BenchmarkSpec>(&spec)) {
    j["kind"] = "benchmark";
    j["benchmark"] = benchmark_name(b->name);
    j["scenario"] = b->scenario;
  } else if (std::holds_alternative<MixtureSpec>(spec)) {
    j["kind"] = "mixture";
  } else {
    const auto& l = std::get<LogisticSpec>(spec);
    j["kind"] = "logistic";
    if (l.generate) {
      j["generate"] = {{"n", l.generate->n}, {"p", l.generate->p}, {"seed", l.generate->seed}};
    } else {
      j["data"] = l.data.string();
    }
    j["prior"] = l.prior == PriorMode::kEmpirical ? "empirical" : "matrix";
  }
  return j;
}

std::string trajectories_csv(const SampleBatch& batch) {
  const std::size_t p = batch.dim();
  const std::size_t steps = batch.trajectory_steps;
  std::string out = "particle,step,t";
  for (std::size_t j = 0; j < p; ++j) out += ",x" + std::to_string(j + 1);
  out += '\n';
  for (std::size_t i = 0; i < batch.size(); ++i) {
    for (std::size_t k = 0; k < steps; ++k) {
      out += std::to_string(i) + ',' + std::to_string(k) + ',' +
             format_double(grid_time(k, steps - 1));
      const double* row = batch.trajectories.data() + (i * steps + k) * p;
      for (std::size_t j = 0; j < p; ++j) out += ',' + format_double(row[j]);
      out += '\n';
    }
  }
  return out;
}

// Distance between two sample sets: exact in 1D, sliced otherwise.
WassersteinEntry sample_distance(const Matrix& a, const Matrix& b, double order,
                                 const DiagnosticsBlock& cfg, const std::string& reference) {
  WassersteinEntry e;
  e.order = order;
  e.reference = reference;
  if (a.cols() == 1) {
    e.method = "exact-1d";
    e.value = wasserstein_1d({a.data(), static_cast<std::size_t>(a.rows())},
                             {b.data(), static_cast<std::size_t>(b.rows())}, order);
  } else {
    e.method = "sliced(" + std::to_string(cfg.projections) + ")";
    e.value = sliced_wasserstein(a, b, order, cfg.projections, cfg.seed);
  }
  return e;
}

Json manifest_json(const RunManifest& m) {
  Json j;
  j["command"] = m.command;
  j["version"] = m.version;
  j["config_hash"] = m.config_hash;
  j["seeds"] = m.seeds;
  Json timings = Json::object();
  for (const auto& [name, sec] : m.timings) timings[name] = sec;
  j["timings"] = timings;
  Json outputs = Json::array();
  for (const auto& o : m.outputs) outputs.push_back(o.string());
  j["outputs"] = outputs;
  return j;
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kSfs: return "sfs";
    case Method::kUla: return "ula";
    case Method::kRwmh: return "rwmh";
  }
  return "?";
}

std::string_view version() { return SFS_VERSION_STRING; }

TargetPtr build_target(const TargetSpec& spec) {
  if (const auto* b = std::get_if<BenchmarkSpec>(&spec))
    return make_mixture_target(make_benchmark(b->name, b->scenario));
  if (const auto* m = std::get_if<MixtureSpec>(&spec)) {
    try {
      return make_gaussian_mixture(m->weights, m->means, m->covariances);
    } catch (const InvalidArgument& e) {
      throw ConfigError("target.mixture", e.what());
    }
  }
  const auto& l = std::get<LogisticSpec>(spec);
  if (l.generate) {
    auto gen = generate_logistic(l.generate->n, l.generate->p, l.generate->seed);
    Matrix precision = l.prior == PriorMode::kEmpirical
                           ? empirical_prior_precision(gen.data.design)
                           : l.prior_precision;
    try {
      return make_logistic_posterior(std::move(gen.data.design), std::move(gen.data.labels),
                                     std::move(precision));
    } catch (const InvalidArgument& e) {
      throw ConfigError("target.logistic", e.what());
    }
  }
  return load_logistic_posterior(l.data, l.prior, l.prior_precision);
}

SampleBatch run_sampler(const TargetPtr& target, const SamplerBlock& block, unsigned threads) {
  SampleBatch batch;
  if (block.method == Method::kSfs) {
    DriftEvaluator drift;
    if (block.drift == DriftChoice::kExact) {
      auto mix = target->closed_form();
      if (!mix) throw InvalidArgument("exact drift needs a Gaussian mixture target");
      drift = DriftEvaluator::exact(std::move(mix));
    } else {
      drift = DriftEvaluator::monte_carlo(
          target, block.mc_samples,
          block.drift == DriftChoice::kMcStein ? DriftForm::kStein : DriftForm::kGradient);
    }
    if (block.epsilon) drift = DriftEvaluator::regularized(*block.epsilon, std::move(drift));
    SamplerConfig cfg;
    cfg.steps = block.steps;
    cfg.particles = block.particles;
    cfg.seed = block.seed;
    cfg.drift = std::move(drift);
    cfg.record_trajectories = block.record_trajectories;
    cfg.threads = threads;
    batch = sfs_run(cfg);
  } else {
    BaselineConfig cfg;
    cfg.kind = block.method == Method::kUla ? BaselineKind::kUla : BaselineKind::kRwmh;
    cfg.step = block.step;
    cfg.iters = block.iters;
    cfg.burn_in = block.burn_in;
    cfg.thin = block.thin;
    cfg.seed = block.seed;
    cfg.init = block.init;
    cfg.chains = block.chains;
    cfg.threads = threads;
    batch = cfg.kind == BaselineKind::kUla ? ula_run(*target, cfg) : rwmh_run(*target, cfg);
  }
  batch.meta.method = std::string(method_name(block.method));
  batch.meta.target_label = target->label();
  return batch;
}

DiagnosticsReport diagnose(const Matrix& points, const TargetPtr& target,
                           const DiagnosticsBlock& cfg, bool with_kde) {
  DiagnosticsReport report;
  if (points.rows() == 0) return report;
  if (cfg.moments) report.moments = moment_summary(points);
  const auto mix = target->closed_form();
  if (mix && cfg.wasserstein) {
    if (points.cols() == 1) {
      const Vector q = mixture_quantiles(*mix, cfg.reference_size);
      const std::string ref = "quantiles(" + std::to_string(cfg.reference_size) + ")";
      const std::span<const double> a(points.data(), static_cast<std::size_t>(points.rows()));
      const std::span<const double> b(q.data(), static_cast<std::size_t>(q.size()));
      for (double order : {1.0, 2.0})
        report.wasserstein.push_back({order, "exact-1d", ref, wasserstein_1d(a, b, order)});
    } else {
      Rng rng = Rng::stream(cfg.seed, StreamTag::kReference, 0);
      const Matrix reference = mix->sample(cfg.reference_size, rng);
      report.wasserstein.push_back(sample_distance(
          points, reference, 2.0, cfg,
          "exact sample(" + std::to_string(cfg.reference_size) + ")"));
    }
  }
  if (mix && cfg.modes) report.modes = mode_proportions(points, mix->centers(), *cfg.modes);
  if (with_kde && points.cols() <= 2) {
    GridSpec grid;
    grid.points = cfg.kde_points;
    report.kde = kde_grid(points, grid);
  }
  return report;
}

RunManifest cmd_sample(const std::filesystem::path& config_path, const RunOptions& opts) {
  const auto cfg = load_config(config_path, CommandKind::kSample);
  const auto& block = cfg.samplers.front();
  RunManifest manifest{"sample", cfg.hash, std::string(version()), {block.seed}, {}, {}, {}};

  auto start = Clock::now();
  const TargetPtr target = build_target(cfg.target);
  manifest.timings.emplace_back("target", seconds_since(start));
  note(opts, "target " + target->label() + " (dim " + std::to_string(target->dim()) + ")");

  start = Clock::now();
  SampleBatch batch = run_sampler(target, block, opts.threads);
  batch.meta.config_hash = cfg.hash;
  manifest.timings.emplace_back("sample", seconds_since(start));
  note(opts, block.name + ": " + std::to_string(batch.size()) + " samples in " +
                 format_double(batch.meta.wall_seconds) + " s");

  start = Clock::now();
  const auto report = diagnose(batch.points, target, cfg.diagnostics,
                               cfg.diagnostics.kde);
  manifest.timings.emplace_back("diagnostics", seconds_since(start));

  const auto dir = cfg.output.directory;
  const auto samples_path = dir / (cfg.output.prefix + ".csv");
  write_file_atomic(samples_path, samples_csv(batch.points));
  manifest.outputs.push_back(samples_path);
  if (batch.has_trajectories()) {
    const auto traj_path = dir / (cfg.output.prefix + "_trajectories.csv");
    write_file_atomic(traj_path, trajectories_csv(batch));
    manifest.outputs.push_back(traj_path);
  }
  manifest.summary = dir / (cfg.output.prefix + "_summary.json");
  manifest.outputs.push_back(manifest.summary);

  Json summary;
  summary["manifest"] = manifest_json(manifest);
  summary["target"] = target_json(cfg.target, *target);
  summary["sampler"] = sampler_json(block, batch);
  summary["sampler"]["samples_file"] = samples_path.filename().string();
  summary["diagnostics"] = report_json(report);
  write_file_atomic(manifest.summary, summary.dump(2) + "\n");
  note(opts, "wrote " + manifest.summary.string());
  return manifest;
}

RunManifest cmd_compare(const std::filesystem::path& config_path, const RunOptions& opts) {
  const auto cfg = load_config(config_path, CommandKind::kCompare);
  RunManifest manifest{"compare", cfg.hash, std::string(version()), {}, {}, {}, {}};
  for (const auto& b : cfg.samplers) manifest.seeds.push_back(b.seed);

  auto start = Clock::now();
  const TargetPtr target = build_target(cfg.target);
  manifest.timings.emplace_back("target", seconds_since(start));
  note(opts, "target " + target->label() + " (dim " + std::to_string(target->dim()) + ")");
  const bool kde = cfg.diagnostics.kde || target->dim() == 1;

  const auto dir = cfg.output.directory;
  std::vector<SampleBatch> batches;
  Json methods = Json::array();
  for (const auto& block : cfg.samplers) {
    start = Clock::now();
    SampleBatch batch = run_sampler(target, block, opts.threads);
    batch.meta.config_hash = cfg.hash;
    manifest.timings.emplace_back(block.name + ".sample", seconds_since(start));
    note(opts, block.name + ": " + std::to_string(batch.size()) + " samples in " +
                   format_double(batch.meta.wall_seconds) + " s");

    start = Clock::now();
    const auto report = diagnose(batch.points, target, cfg.diagnostics, kde);
    manifest.timings.emplace_back(block.name + ".diagnostics", seconds_since(start));

    const auto path = dir / (cfg.output.prefix + "_" + block.name + ".csv");
    write_file_atomic(path, samples_csv(batch.points));
    manifest.outputs.push_back(path);
    if (batch.has_trajectories()) {
      const auto traj = dir / (cfg.output.prefix + "_" + block.name + "_trajectories.csv");
      write_file_atomic(traj, trajectories_csv(batch));
      manifest.outputs.push_back(traj);
    }
    Json m = sampler_json(block, batch);
    m["samples_file"] = path.filename().string();
    m["diagnostics"] = report_json(report);
    methods.push_back(std::move(m));
    batches.push_back(std::move(batch));
  }

  Json pairwise = Json::array();
  if (cfg.diagnostics.wasserstein) {
    for (std::size_t i = 0; i < batches.size(); ++i)
      for (std::size_t j = i + 1; j < batches.size(); ++j) {
        if (batches[i].size() == 0 || batches[j].size() == 0) continue;
        const auto e = sample_distance(batches[i].points, batches[j].points, 2.0,
                                       cfg.diagnostics, cfg.samplers[j].name);
        pairwise.push_back({{"a", cfg.samplers[i].name}, {"b", cfg.samplers[j].name},
                            {"order", e.order}, {"method", e.method}, {"value", e.value}});
      }
  }

  manifest.summary = dir / (cfg.output.prefix + "_compare.json");
  manifest.outputs.push_back(manifest.summary);
  Json summary;
  summary["manifest"] = manifest_json(manifest);
  summary["target"] = target_json(cfg.target, *target);
  summary["methods"] = methods;
  summary["pairwise"] = pairwise;
  write_file_atomic(manifest.summary, summary.dump(2) + "\n");
  note(opts, "wrote " + manifest.summary.string());
  return manifest;
}

RunManifest cmd_gen_logistic(std::size_t n, std::size_t p, std::uint64_t seed,
                             const std::filesystem::path& out_path) {
  const auto start = Clock::now();
  const auto gen = generate_logistic(n, p, seed);
  write_file_atomic(out_path, logistic_csv(gen.data));
  auto beta_path = out_path;
  beta_path += ".beta.json";
  Json beta;
  beta["n"] = n;
  beta["p"] = p;
  beta["seed"] = seed;
  beta["beta"] = vector_json(gen.beta);
  write_file_atomic(beta_path, beta.dump(2) + "\n");
  RunManifest manifest{"gen-logistic", "", std::string(version()), {seed}, {}, {}, {}};
  manifest.outputs = {out_path, beta_path};
  manifest.timings.emplace_back("generate", seconds_since(start));
  return manifest;
}

}  // namespace sfs
