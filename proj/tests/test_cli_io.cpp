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

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "sfs/experiment.hpp"

using namespace sfs;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Fresh scratch directory per test case.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sfs_cli_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string config_error_key(const std::string& text, CommandKind kind = CommandKind::kSample) {
  try {
    parse_config(text, kind);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<accepted>";
}

int run_cli(const std::string& args, const fs::path& stderr_path) {
  const std::string cmd = std::string(SFS_CLI_PATH) + " " + args + " 2> " + stderr_path.string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

constexpr const char* kF1Config = R"(target:
  benchmark: f1
sampler:
  method: sfs
  steps: 100
  particles: 5000
  seed: 7
output:
  prefix: f1
)";

}  // namespace

TEST_CASE("config parsing accepts the documented schema") {
  const auto cfg = parse_config(R"(
target: {benchmark: circle8, scenario: 2}
sampler: {method: sfs, seed: 3, steps: 50, particles: 10, drift: mc-stein, mc_samples: 20,
          epsilon: 0.001, record_trajectories: true}
diagnostics: {modes: kmeans, projections: 8, kde: true, seed: 4}
output: {directory: out, prefix: run}
)",
                                CommandKind::kSample, "/base");
  const auto& b = std::get<BenchmarkSpec>(cfg.target);
  CHECK(b.name == Benchmark::kCircle8);
  CHECK(b.scenario == 2);
  REQUIRE(cfg.samplers.size() == 1);
  const auto& s = cfg.samplers[0];
  CHECK(s.seed == 3);
  CHECK(s.steps == 50);
  CHECK(s.drift == DriftChoice::kMcStein);
  CHECK(s.epsilon == 0.001);
  CHECK(s.record_trajectories);
  CHECK(cfg.diagnostics.modes == AssignMethod::kKMeans);
  CHECK(cfg.diagnostics.projections == 8);
  CHECK(cfg.output.directory == fs::path("/base/out"));
  CHECK(cfg.output.prefix == "run");
  CHECK(cfg.hash.size() == 64);

  const auto mix = parse_config(R"(
target:
  mixture:
    weights: [0.5, 0.5]
    means: [[-1, 0], [1, 0]]
    covariances: [[[0.1, 0], [0, 0.1]], [[0.2, 0.05], [0.05, 0.2]]]
sampler: {seed: 1}
)",
                                CommandKind::kSample);
  CHECK(std::get<MixtureSpec>(mix.target).covariances[1](0, 1) == 0.05);
  CHECK(mix.samplers[0].drift == DriftChoice::kExact);

  const auto lg = parse_config(R"(
target: {logistic: {generate: {n: 100, p: 3, seed: 5}, prior: matrix,
                    prior_precision: [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}}
sampler: {method: rwmh, seed: 9, step: 0.2, iters: 1000, burn_in: 100, thin: 2}
)",
                               CommandKind::kSample);
  const auto& l = std::get<LogisticSpec>(lg.target);
  CHECK(l.generate->n == 100);
  CHECK(l.prior == PriorMode::kMatrix);
  CHECK(lg.samplers[0].method == Method::kRwmh);
  CHECK(lg.samplers[0].burn_in == 100u);
}

TEST_CASE("config parsing rejects bad input and names the key") {
  CHECK(config_error_key("target: {benchmark: f1}\nsampler: {seed: 1, stepsize: 3}\n") ==
        "sampler.stepsize");
  CHECK(config_error_key("target: {benchmark: f1}\nsampler: {steps: 10}\n") == "sampler.seed");
  CHECK(config_error_key("target: {benchmark: f1}\nsampler: {seed: -1}\n") == "sampler.seed");
  CHECK(config_error_key("target: {benchmark: f1, mixture: {}}\nsampler: {seed: 1}\n") ==
        "target");
  CHECK(config_error_key("target: {benchmark: f9}\nsampler: {seed: 1}\n") == "target.benchmark");
  CHECK(config_error_key("target: {benchmark: grid25, scenario: 3}\nsampler: {seed: 1}\n") ==
        "target.scenario");
  CHECK(config_error_key("target: {benchmark: f1}\nsampler: {seed: 1, steps: zero}\n") ==
        "sampler.steps");
  CHECK(config_error_key("target: {benchmark: f1}\nsampler: {seed: 1, method: ula, steps: 3}\n") ==
        "sampler.steps");
  CHECK(config_error_key("target: {benchmark: f1}\nsampler: {seed: 1, epsilon: 1.5}\n") ==
        "sampler.epsilon");
  CHECK(config_error_key("target: {logistic: {data: d.csv}}\nsampler: {seed: 1, drift: exact}\n") ==
        "sampler.drift");
  CHECK(config_error_key(
            "target: {logistic: {data: d.csv}}\nsampler: {seed: 1, epsilon: 0.1}\n") ==
        "sampler.epsilon");
  CHECK(config_error_key("target: {logistic: {data: d.csv, prior: matrix}}\nsampler: {seed: 1}\n") ==
        "target.logistic.prior_precision");
  CHECK(config_error_key("target: {benchmark: f1}\nsamplers: [{seed: 1}]\n",
                         CommandKind::kCompare) == "samplers");
  CHECK(config_error_key("target: {benchmark: f1}\nsamplers: [{seed: 1}, {seed: 2}]\n") ==
        "samplers");
  CHECK(config_error_key("target: {benchmark: f1}\nsampler: {seed: 1}\nextra: 1\n") == "extra");
  CHECK(config_error_key("target: [unclosed\n") == "");
}

TEST_CASE("compare disambiguates repeated sampler names") {
  const auto cfg = parse_config(
      "target: {benchmark: f1}\nsamplers: [{seed: 1}, {seed: 1}, {method: ula, seed: 2}]\n",
      CommandKind::kCompare);
  REQUIRE(cfg.samplers.size() == 3);
  CHECK(cfg.samplers[0].name == "sfs");
  CHECK(cfg.samplers[1].name == "sfs_2");
  CHECK(cfg.samplers[2].name == "ula");
}

TEST_CASE("config hash ignores formatting but not content") {
  const std::string a = "target: {benchmark: f1}\nsampler: {seed: 1, steps: 10}\n";
  const std::string b = "# comment\ntarget:\n    benchmark:   f1\n\nsampler:\n  steps: 10\n  seed: 1\n";
  const std::string c = "target: {benchmark: f1}\nsampler: {seed: 2, steps: 10}\n";
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(c));
  // Fixed value: the hash is a pure function of the canonical text.
  CHECK(config_hash("a: 1\n") == config_hash("a:    1"));
}

TEST_CASE("number formatting round-trips exactly") {
  Rng rng(3);
  Matrix m(200, 3);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < 3; ++j)
      m(i, j) = rng.normal() * std::pow(10.0, static_cast<double>(rng.next_u64() % 40) - 20.0);
  m(0, 0) = std::numeric_limits<double>::denorm_min();
  m(0, 1) = -0.0;
  m(0, 2) = std::numeric_limits<double>::max();
  const auto dir = scratch("roundtrip");
  write_file_atomic(dir / "s.csv", samples_csv(m));
  const Matrix back = read_samples_csv(dir / "s.csv");
  CHECK(back == m);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(slurp(dir / "s.csv").substr(0, 9) == "x1,x2,x3\n");
  CHECK_FALSE(fs::exists(dir / "s.csv.tmp"));
}

TEST_CASE("logistic CSV validation names the row") {
  try {
    parse_logistic_csv("x1,y\n0.5,1\n1.5,2\n");
    FAIL("expected rejection");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  try {
    parse_logistic_csv("x1,x2,y\n0.5,1,1\n1.5,0\n");
    FAIL("expected rejection");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_logistic_csv("x1,y\nabc,1\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_logistic_csv("x1,label\n1,1\n"), InvalidArgument);
  const auto ok = parse_logistic_csv("x1,x2,y\r\n1,2,0\r\n3,4,1\r\n\r\n");
  CHECK(ok.design.rows() == 2);
  CHECK(ok.labels[1] == 1.0);
}

TEST_CASE("synthetic logistic data") {
  const auto small = generate_logistic(4, 2, 11);
  CHECK(small.data.design.rows() == 4);
  CHECK(small.data.design.cols() == 2);
  for (Eigen::Index i = 0; i < 4; ++i)
    CHECK((small.data.labels[i] == 0.0 || small.data.labels[i] == 1.0));

  const Matrix s3 = ar1_covariance(3, 0.5);
  CHECK(s3(0, 1) == 0.5);
  CHECK(s3(0, 2) == 0.25);
  const Matrix l = Eigen::LLT<Matrix>(s3).matrixL();
  CHECK((l * l.transpose() - s3).cwiseAbs().maxCoeff() <= 1e-12);

  const auto big = generate_logistic(100000, 2, 12);
  const Vector c0 = big.data.design.col(0).array() - big.data.design.col(0).mean();
  const Vector c1 = big.data.design.col(1).array() - big.data.design.col(1).mean();
  const double corr = c0.dot(c1) / (c0.norm() * c1.norm());
  CHECK(std::abs(corr - 0.5) <= 0.02);

  const auto sized = generate_logistic(1000, 5, 13);
  CHECK(Eigen::LLT<Matrix>(empirical_prior_precision(sized.data.design)).info() == Eigen::Success);
  CHECK(generate_logistic(50, 3, 14).data.design == generate_logistic(50, 3, 14).data.design);
  CHECK_THROWS_AS(generate_logistic(0, 3, 1), InvalidArgument);
}

TEST_CASE("gen-logistic output round-trips bit for bit") {
  const auto dir = scratch("gen");
  const auto manifest = cmd_gen_logistic(300, 4, 21, dir / "data.csv");
  CHECK(manifest.outputs.size() == 2);
  const auto gen = generate_logistic(300, 4, 21);
  const auto back = read_logistic_csv(dir / "data.csv");
  CHECK(back.design == gen.data.design);
  CHECK(back.labels == gen.data.labels);
  const auto beta = nlohmann::json::parse(slurp(dir / "data.csv.beta.json"));
  REQUIRE(beta["beta"].size() == 4);
  for (int j = 0; j < 4; ++j) CHECK(beta["beta"][j].get<double>() == gen.beta[j]);
  const auto post = load_logistic_posterior(dir / "data.csv", PriorMode::kEmpirical);
  CHECK(post->dim() == 4);
}

TEST_CASE("singular empirical prior is reported") {
  const auto dir = scratch("singular");
  spit(dir / "d.csv", "x1,x2,y\n1,1,0\n2,2,1\n3,3,0\n");
  CHECK_THROWS_AS(load_logistic_posterior(dir / "d.csv", PriorMode::kEmpirical), InvalidArgument);
}

TEST_CASE("sample command writes reproducible artifacts") {
  const auto dir = scratch("sample");
  spit(dir / "f1.yaml", kF1Config);
  const auto m = cmd_sample(dir / "f1.yaml", RunOptions{});
  const Matrix pts = read_samples_csv(dir / "f1.csv");
  CHECK(pts.rows() == 5000);
  CHECK(pts.cols() == 1);
  const std::string first = slurp(dir / "f1.csv");
  cmd_sample(dir / "f1.yaml", RunOptions{2, true, nullptr});
  CHECK(slurp(dir / "f1.csv") == first);

  const auto summary = nlohmann::json::parse(slurp(m.summary));
  CHECK(summary["manifest"]["config_hash"] == config_hash(kF1Config));
  CHECK(summary["manifest"]["seeds"][0] == 7);
  CHECK(summary["sampler"]["particles"] == 5000);
  CHECK(summary["diagnostics"]["wasserstein"][0]["order"] == 1.0);
  for (const auto& f : summary["diagnostics"]["modes"]["frequencies"])
    CHECK(std::abs(f.get<double>() - 0.5) <= 0.05);
}

TEST_CASE("circle8 summary reports eight mode proportions") {
  const auto dir = scratch("circle");
  spit(dir / "c.yaml",
       "target: {benchmark: circle8, scenario: 2}\n"
       "sampler: {seed: 3, particles: 400, steps: 50, record_trajectories: true}\n"
       "diagnostics: {reference_size: 2000, kde: true, kde_points: 30}\n"
       "output: {prefix: c8}\n");
  const auto m = cmd_sample(dir / "c.yaml", RunOptions{});
  const auto summary = nlohmann::json::parse(slurp(m.summary));
  const auto& freq = summary["diagnostics"]["modes"]["frequencies"];
  REQUIRE(freq.size() == 8);
  double total = 0.0;
  for (const auto& f : freq) total += f.get<double>();
  CHECK(std::abs(total - 1.0) <= 1e-12);
  CHECK(summary["diagnostics"]["kde"]["density"].size() == 900);
  const auto traj = slurp(dir / "c8_trajectories.csv");
  CHECK(traj.rfind("particle,step,t,x1,x2\n0,0,0,0,0\n", 0) == 0);
}

TEST_CASE("compare command writes one file per method and a joint summary") {
  const auto dir = scratch("compare");
  spit(dir / "cmp.yaml", R"(target: {benchmark: f3}
samplers:
  - {method: sfs, seed: 1, particles: 500, steps: 50}
  - {method: ula, seed: 2, step: 0.01, iters: 2000}
  - {method: rwmh, seed: 3, step: 0.5, iters: 2000}
  - {method: sfs, seed: 1, particles: 500, steps: 50}
diagnostics: {reference_size: 5000, kde_points: 50}
output: {prefix: cmp}
)");
  const auto m = cmd_compare(dir / "cmp.yaml", RunOptions{});
  for (const char* name : {"cmp_sfs.csv", "cmp_ula.csv", "cmp_rwmh.csv", "cmp_sfs_2.csv",
                           "cmp_compare.json"})
    CHECK(fs::exists(dir / name));
  const auto summary = nlohmann::json::parse(slurp(m.summary));
  REQUIRE(summary["methods"].size() == 4);
  CHECK(summary["pairwise"].size() == 6);
  CHECK(summary["methods"][0]["diagnostics"] == summary["methods"][3]["diagnostics"]);
  CHECK(summary["methods"][0]["diagnostics"]["kde"]["density"].size() == 50);
  CHECK(summary["methods"][2].contains("acceptance_rate"));
  // Stable key order.
  auto it = summary.begin();
  CHECK(it.key() == "manifest");
}

TEST_CASE("logistic compare reports moments per method") {
  const auto dir = scratch("logistic");
  spit(dir / "lr.yaml", R"(target: {logistic: {generate: {n: 1000, p: 5, seed: 4}}}
samplers:
  - {method: sfs, seed: 1, particles: 20, steps: 10, mc_samples: 50}
  - {method: rwmh, seed: 2, step: 0.1, iters: 3000}
output: {prefix: lr}
)");
  const auto m = cmd_compare(dir / "lr.yaml", RunOptions{});
  const auto summary = nlohmann::json::parse(slurp(m.summary));
  for (const auto& method : summary["methods"]) {
    CHECK(method["diagnostics"]["moments"]["mean"].size() == 5);
    CHECK(method["diagnostics"]["moments"]["median"].size() == 5);
    CHECK(method["diagnostics"]["moments"]["variance"].size() == 5);
    CHECK_FALSE(method["diagnostics"].contains("modes"));
  }
}

TEST_CASE("command line exit codes") {
  const auto dir = scratch("exit");
  spit(dir / "ok.yaml", "target: {benchmark: f1}\nsampler: {seed: 1, particles: 10}\n");
  spit(dir / "bad.yaml", "target: {benchmark: f1}\nsampler: {seed: 1, stepsize: 3}\n");
  spit(dir / "nan.csv", "x1,x2,y\n1e308,1e308,1\n");
  spit(dir / "nan.yaml",
       "target: {logistic: {data: nan.csv, prior: matrix, prior_precision: [[1, 0], [0, 1]]}}\n"
       "sampler: {seed: 1, particles: 2, steps: 2, mc_samples: 4}\n");
  const auto err = dir / "stderr.txt";
  CHECK(run_cli("--quiet sample " + (dir / "ok.yaml").string(), err) == 0);
  CHECK(fs::exists(dir / "sfs.csv"));
  CHECK(run_cli("sample " + (dir / "bad.yaml").string(), err) == 2);
  CHECK(slurp(err).find("stepsize") != std::string::npos);
  CHECK(run_cli("sample " + (dir / "nan.yaml").string(), err) == 3);
  CHECK(slurp(err).find("non-finite drift") != std::string::npos);
  CHECK(run_cli("sample " + (dir / "missing.yaml").string(), err) == 2);
  CHECK(run_cli("gen-logistic --n 5 --p 2 --seed 3 --out " + (dir / "g.csv").string(), err) == 0);
  CHECK(fs::exists(dir / "g.csv.beta.json"));
  CHECK(run_cli("gen-logistic --n 0 --p 2 --seed 3 --out x.csv", err) == 2);
  CHECK(run_cli("--threads 2 compare " + (dir / "ok.yaml").string(), err) == 2);
}
