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

#pragma once

// Subcommands behind the vground executable. Each writes its outputs and a
// manifest.json listing every output file with its SHA-256.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vground/selective.hpp"

namespace vground {

namespace fs = std::filesystem;

inline constexpr std::string_view kManifestFile = "manifest.json";

struct RunManifest {
  std::string command;
  std::string run_id;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;   // (name, digest)
  std::vector<std::pair<std::string, std::string>> outputs;  // (file, digest)
  std::string created_at;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

// Writes the manifest for the listed output files of `dir`. The run id
// digests the command, seed, config hash and inputs.
RunManifest write_manifest(const fs::path& dir, const std::string& command, std::uint64_t seed,
                           const std::string& config_hash,
                           std::vector<std::pair<std::string, std::string>> inputs,
                           const std::vector<std::string>& files);

RunManifest cmd_gen_bench(std::uint64_t seed, const fs::path& out_dir);

// The seed flag, when given, replaces the config file's seed.
RunManifest cmd_train(const fs::path& config_file, const fs::path& dataset_dir,
                      const fs::path& out_dir, std::optional<std::uint64_t> seed);

struct EvalCommandOptions {
  int workers = 1;
  CalibrationTarget target = CalibrationTarget::max_total;
  std::uint64_t seed = 0;
};

RunManifest cmd_eval(const fs::path& checkpoint, const fs::path& dataset_dir,
                     const fs::path& out_dir, const EvalCommandOptions& options);

struct TheoryCommandOptions {
  std::uint64_t seed = 0;
  int batches = 2000;
  int bottleneck_episodes = 100;
};

// Throws NumericalError after writing the report when the bound fails.
RunManifest cmd_verify_theory(const fs::path& checkpoint, const fs::path& dataset_dir,
                              const fs::path& out_dir, const TheoryCommandOptions& options);

// Reads metrics.json (and episodes.jsonl, risk_coverage.csv) from each run
// directory produced by eval.
RunManifest cmd_report(const std::vector<fs::path>& run_dirs, const fs::path& out_dir,
                       std::uint64_t seed);

// Runs `body`, maps exceptions to exit codes (2 validation, 3 numerical,
// 1 anything else) and prints them as one JSON object on `err`.
int run_guarded(const std::function<void()>& body, std::ostream& err);

}  // namespace vground
