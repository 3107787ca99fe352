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

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include "sfs/experiment.hpp"

namespace sfs {
namespace {

using Keys = std::set<std::string, std::less<>>;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void require_map(const YAML::Node& node, const std::string& path) {
  if (!node.IsMap()) throw ConfigError(path, "expected a mapping");
}

void reject_unknown(const YAML::Node& node, const std::string& path, const Keys& allowed) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) throw ConfigError(join(path, key), "unknown key");
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& path, const char* what) {
  if (!node.IsScalar()) throw ConfigError(path, std::string("expected ") + what);
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(path, std::string("expected ") + what + ", got '" +
                                node.Scalar() + "'");
  }
}

std::size_t positive(const YAML::Node& node, const std::string& path) {
  const auto text = scalar<std::string>(node, path, "a positive integer");
  if (!text.empty() && text[0] == '-') throw ConfigError(path, "must be a positive integer");
  const auto v = scalar<std::uint64_t>(node, path, "a positive integer");
  if (v == 0) throw ConfigError(path, "must be >= 1");
  return static_cast<std::size_t>(v);
}

std::size_t nonnegative(const YAML::Node& node, const std::string& path) {
  const auto text = scalar<std::string>(node, path, "a nonnegative integer");
  if (!text.empty() && text[0] == '-') throw ConfigError(path, "must be nonnegative");
  return static_cast<std::size_t>(scalar<std::uint64_t>(node, path, "a nonnegative integer"));
}

std::uint64_t seed_value(const YAML::Node& node, const std::string& path) {
  const auto text = scalar<std::string>(node, path, "an unsigned 64-bit seed");
  if (!text.empty() && text[0] == '-') throw ConfigError(path, "seed must be nonnegative");
  return scalar<std::uint64_t>(node, path, "an unsigned 64-bit seed");
}

double real(const YAML::Node& node, const std::string& path) {
  const double v = scalar<double>(node, path, "a number");
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

Vector vector_of(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence() || node.size() == 0)
    throw ConfigError(path, "expected a non-empty list of numbers");
  Vector v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = real(node[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Matrix matrix_of(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence() || node.size() == 0)
    throw ConfigError(path, "expected a matrix (list of rows)");
  Matrix m;
  for (std::size_t r = 0; r < node.size(); ++r) {
    const Vector row = vector_of(node[r], path + "[" + std::to_string(r) + "]");
    if (r == 0) m.resize(static_cast<Eigen::Index>(node.size()), row.size());
    if (row.size() != m.cols()) throw ConfigError(path, "ragged matrix rows");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

TargetSpec parse_target(const YAML::Node& node, const std::filesystem::path& base_dir) {
  const std::string path = "target";
  require_map(node, path);
  reject_unknown(node, path, {"benchmark", "scenario", "mixture", "logistic"});
  const int kinds = (node["benchmark"] ? 1 : 0) + (node["mixture"] ? 1 : 0) +
                    (node["logistic"] ? 1 : 0);
  if (kinds != 1)
    throw ConfigError(path, "exactly one of 'benchmark', 'mixture' or 'logistic' is required");
  if (node["scenario"] && !node["benchmark"])
    throw ConfigError("target.scenario", "only valid together with 'benchmark'");

  if (node["benchmark"]) {
    const auto name = scalar<std::string>(node["benchmark"], "target.benchmark", "a name");
    const auto b = parse_benchmark(name);
    if (!b) throw ConfigError("target.benchmark", "unknown benchmark '" + name + "'");
    BenchmarkSpec spec{*b, 1};
    if (node["scenario"]) {
      spec.scenario = static_cast<int>(positive(node["scenario"], "target.scenario"));
      if (spec.scenario > benchmark_scenarios(*b))
        throw ConfigError("target.scenario",
                          "benchmark '" + name + "' has scenarios 1.." +
                              std::to_string(benchmark_scenarios(*b)));
    }
    return spec;
  }

  if (node["mixture"]) {
    const std::string mp = "target.mixture";
    const auto& m = node["mixture"];
    require_map(m, mp);
    reject_unknown(m, mp, {"weights", "means", "covariances"});
    for (const char* key : {"weights", "means", "covariances"})
      if (!m[key]) throw ConfigError(join(mp, key), "missing");
    MixtureSpec spec;
    const Vector w = vector_of(m["weights"], mp + ".weights");
    spec.weights.assign(w.data(), w.data() + w.size());
    const auto& means = m["means"];
    const auto& covs = m["covariances"];
    if (!means.IsSequence() || means.size() != spec.weights.size())
      throw ConfigError(mp + ".means", "needs one mean per weight");
    if (!covs.IsSequence() || covs.size() != spec.weights.size())
      throw ConfigError(mp + ".covariances", "needs one covariance per weight");
    for (std::size_t i = 0; i < means.size(); ++i) {
      spec.means.push_back(vector_of(means[i], mp + ".means[" + std::to_string(i) + "]"));
      spec.covariances.push_back(
          matrix_of(covs[i], mp + ".covariances[" + std::to_string(i) + "]"));
    }
    return spec;
  }

  const std::string lp = "target.logistic";
  const auto& l = node["logistic"];
  require_map(l, lp);
  reject_unknown(l, lp, {"data", "generate", "prior", "prior_precision"});
  LogisticSpec spec;
  if ((l["data"] ? 1 : 0) + (l["generate"] ? 1 : 0) != 1)
    throw ConfigError(lp, "exactly one of 'data' or 'generate' is required");
  if (l["data"]) {
    std::filesystem::path data = scalar<std::string>(l["data"], lp + ".data", "a path");
    spec.data = data.is_absolute() ? data : base_dir / data;
  } else {
    const std::string gp = lp + ".generate";
    const auto& g = l["generate"];
    require_map(g, gp);
    reject_unknown(g, gp, {"n", "p", "seed"});
    for (const char* key : {"n", "p", "seed"})
      if (!g[key]) throw ConfigError(join(gp, key), "missing");
    spec.generate = LogisticSpec::Generate{positive(g["n"], gp + ".n"),
                                           positive(g["p"], gp + ".p"),
                                           seed_value(g["seed"], gp + ".seed")};
  }
  const std::string prior =
      l["prior"] ? scalar<std::string>(l["prior"], lp + ".prior", "a prior mode") : "empirical";
  if (prior == "empirical") {
    spec.prior = PriorMode::kEmpirical;
    if (l["prior_precision"])
      throw ConfigError(lp + ".prior_precision", "only valid with prior: matrix");
  } else if (prior == "matrix") {
    spec.prior = PriorMode::kMatrix;
    if (!l["prior_precision"]) throw ConfigError(lp + ".prior_precision", "missing");
    spec.prior_precision = matrix_of(l["prior_precision"], lp + ".prior_precision");
  } else {
    throw ConfigError(lp + ".prior", "expected 'empirical' or 'matrix', got '" + prior + "'");
  }
  return spec;
}

const Keys kCommonSamplerKeys = {"name", "method", "seed"};
const Keys kSfsKeys = {"steps", "particles", "drift", "mc_samples", "epsilon",
                       "record_trajectories"};
const Keys kChainKeys = {"step", "iters", "burn_in", "thin", "chains", "init"};

SamplerBlock parse_sampler(const YAML::Node& node, const std::string& path,
                           const TargetSpec& target) {
  require_map(node, path);
  SamplerBlock block;
  const std::string method =
      node["method"] ? scalar<std::string>(node["method"], join(path, "method"), "a method")
                     : "sfs";
  if (method == "sfs") block.method = Method::kSfs;
  else if (method == "ula") block.method = Method::kUla;
  else if (method == "rwmh") block.method = Method::kRwmh;
  else throw ConfigError(join(path, "method"), "expected sfs, ula or rwmh, got '" + method + "'");

  Keys allowed = kCommonSamplerKeys;
  const Keys& own = block.method == Method::kSfs ? kSfsKeys : kChainKeys;
  const Keys& other = block.method == Method::kSfs ? kChainKeys : kSfsKeys;
  allowed.insert(own.begin(), own.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (other.contains(key))
      throw ConfigError(join(path, key), "not valid for method '" + method + "'");
  }
  reject_unknown(node, path, allowed);

  if (!node["seed"]) throw ConfigError(join(path, "seed"), "missing (a seed is mandatory)");
  block.seed = seed_value(node["seed"], join(path, "seed"));
  block.name = node["name"] ? scalar<std::string>(node["name"], join(path, "name"), "a name")
                            : method;
  if (block.name.empty() ||
      block.name.find_first_of("/\\ \t") != std::string::npos)
    throw ConfigError(join(path, "name"), "must be non-empty without spaces or slashes");

  const bool is_mixture = !std::holds_alternative<LogisticSpec>(target);
  if (block.method == Method::kSfs) {
    if (node["steps"]) block.steps = positive(node["steps"], join(path, "steps"));
    if (node["particles"]) block.particles = positive(node["particles"], join(path, "particles"));
    if (node["mc_samples"])
      block.mc_samples = positive(node["mc_samples"], join(path, "mc_samples"));
    block.drift = is_mixture ? DriftChoice::kExact : DriftChoice::kMcGradient;
    if (node["drift"]) {
      const auto d = scalar<std::string>(node["drift"], join(path, "drift"), "a drift form");
      if (d == "exact") block.drift = DriftChoice::kExact;
      else if (d == "mc-gradient") block.drift = DriftChoice::kMcGradient;
      else if (d == "mc-stein") block.drift = DriftChoice::kMcStein;
      else throw ConfigError(join(path, "drift"),
                             "expected exact, mc-gradient or mc-stein, got '" + d + "'");
    }
    if (block.drift == DriftChoice::kExact && !is_mixture)
      throw ConfigError(join(path, "drift"), "exact drift needs a Gaussian mixture target");
    if (node["epsilon"]) {
      const double eps = real(node["epsilon"], join(path, "epsilon"));
      if (!(eps > 0.0 && eps < 1.0)) throw ConfigError(join(path, "epsilon"), "must lie in (0, 1)");
      if (!is_mixture)
        throw ConfigError(join(path, "epsilon"),
                          "regularization needs a target with known normalization");
      block.epsilon = eps;
    }
    if (node["record_trajectories"])
      block.record_trajectories =
          scalar<bool>(node["record_trajectories"], join(path, "record_trajectories"), "a boolean");
  } else {
    if (node["step"]) {
      block.step = real(node["step"], join(path, "step"));
      if (!(block.step > 0.0)) throw ConfigError(join(path, "step"), "must be positive");
    }
    if (node["iters"]) block.iters = positive(node["iters"], join(path, "iters"));
    if (node["burn_in"]) block.burn_in = nonnegative(node["burn_in"], join(path, "burn_in"));
    if (node["thin"]) block.thin = positive(node["thin"], join(path, "thin"));
    if (node["chains"]) block.chains = positive(node["chains"], join(path, "chains"));
    if (node["init"]) block.init = vector_of(node["init"], join(path, "init"));
    if (block.burn_in.value_or(block.iters / 5) >= block.iters)
      throw ConfigError(join(path, "burn_in"), "must be smaller than iters");
  }
  return block;
}

DiagnosticsBlock parse_diagnostics(const YAML::Node& node) {
  const std::string path = "diagnostics";
  require_map(node, path);
  reject_unknown(node, path, {"moments", "modes", "wasserstein", "reference_size",
                              "projections", "kde", "kde_points", "seed"});
  DiagnosticsBlock d;
  if (node["moments"]) d.moments = scalar<bool>(node["moments"], "diagnostics.moments", "a boolean");
  if (node["modes"]) {
    const auto m = scalar<std::string>(node["modes"], "diagnostics.modes", "a mode method");
    if (m == "nearest") d.modes = AssignMethod::kNearest;
    else if (m == "kmeans") d.modes = AssignMethod::kKMeans;
    else if (m == "none") d.modes.reset();
    else throw ConfigError("diagnostics.modes", "expected nearest, kmeans or none, got '" + m + "'");
  }
  if (node["wasserstein"])
    d.wasserstein = scalar<bool>(node["wasserstein"], "diagnostics.wasserstein", "a boolean");
  if (node["reference_size"])
    d.reference_size = positive(node["reference_size"], "diagnostics.reference_size");
  if (node["projections"])
    d.projections = positive(node["projections"], "diagnostics.projections");
  if (node["kde"]) d.kde = scalar<bool>(node["kde"], "diagnostics.kde", "a boolean");
  if (node["kde_points"]) {
    d.kde_points = positive(node["kde_points"], "diagnostics.kde_points");
    if (d.kde_points < 2) throw ConfigError("diagnostics.kde_points", "must be >= 2");
  }
  if (node["seed"]) d.seed = seed_value(node["seed"], "diagnostics.seed");
  return d;
}

OutputBlock parse_output(const YAML::Node& node, const std::filesystem::path& base_dir) {
  require_map(node, "output");
  reject_unknown(node, "output", {"directory", "prefix"});
  OutputBlock out;
  out.directory = base_dir;
  if (node["directory"]) {
    std::filesystem::path dir =
        scalar<std::string>(node["directory"], "output.directory", "a path");
    out.directory = dir.is_absolute() ? dir : base_dir / dir;
  }
  if (node["prefix"]) {
    out.prefix = scalar<std::string>(node["prefix"], "output.prefix", "a file prefix");
    if (out.prefix.empty() || out.prefix.find_first_of("/\\") != std::string::npos)
      throw ConfigError("output.prefix", "must be a non-empty file name prefix");
  }
  return out;
}

nlohmann::json canonical(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Map: {
      nlohmann::json obj = nlohmann::json::object();  // std::map: sorted keys
      for (const auto& kv : node) obj[kv.first.as<std::string>()] = canonical(kv.second);
      return obj;
    }
    case YAML::NodeType::Sequence: {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& item : node) arr.push_back(canonical(item));
      return arr;
    }
    case YAML::NodeType::Scalar:
      return node.Scalar();
    default:
      return nullptr;
  }
}

YAML::Node load_yaml(std::string_view text) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError("", std::string("malformed config: ") + e.what());
  }
}

}  // namespace

std::string config_hash(std::string_view text) {
  const std::string canon = canonical(load_yaml(text)).dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(canon.data(), canon.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

ExperimentConfig parse_config(std::string_view text, CommandKind kind,
                              const std::filesystem::path& base_dir) {
  const YAML::Node root = load_yaml(text);
  if (!root.IsMap()) throw ConfigError("", "config must be a mapping at the top level");
  const char* sampler_key = kind == CommandKind::kSample ? "sampler" : "samplers";
  reject_unknown(root, "", {"target", sampler_key, "diagnostics", "output"});

  ExperimentConfig cfg;
  if (!root["target"]) throw ConfigError("target", "missing");
  cfg.target = parse_target(root["target"], base_dir);

  if (!root[sampler_key]) throw ConfigError(sampler_key, "missing");
  if (kind == CommandKind::kSample) {
    cfg.samplers.push_back(parse_sampler(root["sampler"], "sampler", cfg.target));
  } else {
    const auto& list = root["samplers"];
    if (!list.IsSequence() || list.size() < 2)
      throw ConfigError("samplers", "compare needs a list of at least two sampler blocks");
    for (std::size_t i = 0; i < list.size(); ++i)
      cfg.samplers.push_back(
          parse_sampler(list[i], "samplers[" + std::to_string(i) + "]", cfg.target));
    // Disambiguate repeated names in order of appearance.
    std::set<std::string> seen;
    for (auto& block : cfg.samplers) {
      std::string name = block.name;
      for (int k = 2; seen.contains(name); ++k) name = block.name + "_" + std::to_string(k);
      block.name = name;
      seen.insert(name);
    }
  }
  if (root["diagnostics"]) cfg.diagnostics = parse_diagnostics(root["diagnostics"]);
  cfg.output.directory = base_dir;
  if (root["output"]) cfg.output = parse_output(root["output"], base_dir);
  cfg.hash = config_hash(text);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, CommandKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), kind, path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace sfs
