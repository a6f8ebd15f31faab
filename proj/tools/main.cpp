// Copyright 2026 The vground Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vground/cli.hpp"
#include "vground/errors.hpp"
#include "vground/pipeline.hpp"

namespace {

vground::CalibrationTarget target_flag(const std::string& s) {
  const auto t = vground::parse_calibration_target(s);
  if (!t) throw vground::ValidationError("unknown calibration target '" + s + "'");
  return *t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vground: grounding, ambiguity and selective prediction on a procedural benchmark"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out_dir;
  std::string dataset_dir;
  std::string checkpoint;
  std::string config_file;
  std::string target = "max_total";
  int batches = 2000;
  int bottleneck_episodes = 100;
  std::vector<std::string> run_dirs;

  auto* gen = app.add_subcommand("gen-bench", "Generate the benchmark dataset");
  gen->add_option("--seed", seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", out_dir, "Output directory")->required();

  auto* train = app.add_subcommand("train", "Train a model from a key=value config file");
  train->add_option("--config", config_file, "Config file")->required();
  train->add_option("--data", dataset_dir, "Dataset directory")->required();
  train->add_option("--out", out_dir, "Output directory")->required();
  auto* train_seed = train->add_option("--seed", seed, "Overrides the config seed");

  auto* eval = app.add_subcommand("eval", "Calibrate on val and evaluate on test");
  eval->add_option("--checkpoint", checkpoint, "checkpoint.json")->required();
  eval->add_option("--data", dataset_dir, "Dataset directory")->required();
  eval->add_option("--out", out_dir, "Output directory")->required();
  eval->add_option("--seed", seed, "Retrieval and bootstrap seed")->capture_default_str();
  eval->add_option("--target", target, "Calibration target: max_total or cov_at_95")
      ->capture_default_str();

  auto* theory = app.add_subcommand("verify-theory", "Numerical checks on a trained checkpoint");
  theory->add_option("--checkpoint", checkpoint, "checkpoint.json")->required();
  theory->add_option("--data", dataset_dir, "Dataset directory")->required();
  theory->add_option("--out", out_dir, "Output directory")->required();
  theory->add_option("--seed", seed, "Sampling seed")->capture_default_str();
  theory->add_option("--batches", batches, "Contrastive batches per N")->capture_default_str();
  theory->add_option("--bottleneck-episodes", bottleneck_episodes, "Episodes to replay")
      ->capture_default_str();

  auto* report = app.add_subcommand("report", "Compare eval runs");
  report->add_option("runs", run_dirs, "Eval output directories")->required();
  report->add_option("--out", out_dir, "Output directory")->required();
  report->add_option("--seed", seed, "Bootstrap seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  return vground::run_guarded(
      [&] {
        vground::RunManifest m;
        if (*gen) {
          m = vground::cmd_gen_bench(seed, out_dir);
        } else if (*train) {
          std::optional<std::uint64_t> s;
          if (*train_seed) s = seed;
          m = vground::cmd_train(config_file, dataset_dir, out_dir, s);
        } else if (*eval) {
          vground::EvalCommandOptions o;
          o.workers = vground::env_workers();
          o.target = target_flag(target);
          o.seed = seed;
          m = vground::cmd_eval(checkpoint, dataset_dir, out_dir, o);
        } else if (*theory) {
          vground::TheoryCommandOptions o;
          o.seed = seed;
          o.batches = batches;
          o.bottleneck_episodes = bottleneck_episodes;
          m = vground::cmd_verify_theory(checkpoint, dataset_dir, out_dir, o);
        } else {
          std::vector<vground::fs::path> dirs(run_dirs.begin(), run_dirs.end());
          m = vground::cmd_report(dirs, out_dir, seed);
        }
        std::cout << vground::to_json(m).dump(2) << std::endl;
      },
      std::cerr);
}
