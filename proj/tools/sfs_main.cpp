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

// sfs: command-line front end over the C API.
//
// Exit codes: 0 success, 2 invalid config or usage, 3 numeric abort,
// 1 any other failure (unreadable data, unwritable output, ...).

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "sfs/sfs.h"

namespace {

int exit_code(sfs_status status) {
  switch (status) {
    case SFS_OK: return 0;
    case SFS_ERR_CONFIG: return 2;
    case SFS_ERR_NUMERIC: return 3;
    default: return 1;
  }
}

int report(sfs_status status) {
  if (status != SFS_OK) std::fprintf(stderr, "sfs: %s: %s\n", sfs_status_name(status), sfs_last_error());
  return exit_code(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampling by Schrodinger-Follmer diffusion"};
  app.set_version_flag("--version", std::string(sfs_version()));
  app.require_subcommand(1);

  unsigned threads = 1;
  bool quiet = false;
  app.add_option("--threads", threads, "Worker threads (0 = all cores)")
      ->envname("SFS_THREADS")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet,-q", quiet, "Suppress progress output");

  std::string config;
  auto* sample = app.add_subcommand("sample", "Run one sampler from a config file");
  sample->add_option("config", config, "Experiment config (YAML)")->required();
  auto* compare = app.add_subcommand("compare", "Run several samplers on one target");
  compare->add_option("config", config, "Experiment config (YAML)")->required();

  std::size_t n = 0, p = 0;
  std::uint64_t seed = 0;
  std::string out;
  auto* gen = app.add_subcommand("gen-logistic", "Generate synthetic logistic regression data");
  gen->add_option("--n", n, "Number of rows")->required()->check(CLI::PositiveNumber);
  gen->add_option("--p", p, "Number of covariates")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "Random seed")->required();
  gen->add_option("--out", out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const sfs_run_options opts{threads, quiet ? 1 : 0};
  if (*sample) return report(sfs_cmd_sample(config.c_str(), &opts));
  if (*compare) return report(sfs_cmd_compare(config.c_str(), &opts));
  const int code = report(sfs_cmd_gen_logistic(n, p, seed, out.c_str()));
  if (code == 0 && !quiet) std::fprintf(stderr, "wrote %s and %s.beta.json\n", out.c_str(), out.c_str());
  return code;
}
