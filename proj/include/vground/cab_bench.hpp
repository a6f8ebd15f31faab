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

// Procedural ambiguity benchmark: 48 scenes split 32/8/8, 50 instructions
// per scene (25 unambiguous, 25 ambiguous), 2,400 in total.
//
// Unambiguous instructions name one object through a minimal distinguishing
// attribute set. Ambiguous instructions start from an object's full
// description and drop attributes until at least two objects match.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vground/planner.hpp"
#include "vground/world_sim.hpp"

namespace vground {

inline constexpr int kCabSchemaVersion = 1;
inline constexpr std::string_view kCabGrammarVersion = "cab-grammar-1";

enum class Split { train, val, test };

std::string_view to_string(Split s);
std::optional<Split> parse_split(std::string_view s);

struct CabConfig {
  int train_scenes = 32;
  int val_scenes = 8;
  int test_scenes = 8;
  int unambiguous_per_scene = 25;
  int ambiguous_per_scene = 25;
  int max_scene_resamples = 100;
  SceneConfig scene;
};

struct CabScene {
  Scene scene;
  Split split = Split::train;
};

struct CabInstruction {
  int instruction_id = 0;
  int scene_id = 0;
  Split split = Split::train;
  Instruction instruction;
  // Object the scripted demonstration reaches for; one of the referents.
  int demo_target_id = 0;
};

struct CabDataset {
  std::vector<CabScene> scenes;
  std::vector<CabInstruction> instructions;
  std::string grammar_version = std::string(kCabGrammarVersion);
  std::uint64_t seed = 0;

  const CabScene& scene(int scene_id) const;
  std::vector<const CabScene*> scenes_in(Split s) const;
  std::vector<const CabInstruction*> instructions_in(Split s) const;
  // Checks counts, split hygiene and label/resolver agreement; throws
  // ValidationError on the first violation.
  void validate() const;
};

// Ground-truth entity set (attributes and positions only).
EntitySet ground_truth_entities(const Scene& scene);

// Number of referents the planner resolves for an instruction on its scene.
std::size_t resolved_referents(const CabDataset& ds, const CabInstruction& ins);

CabDataset build_dataset(std::uint64_t seed, const CabConfig& config = {});

inline constexpr std::string_view kScenesFile = "scenes.jsonl";
inline constexpr std::string_view kInstructionsFile = "instructions.jsonl";
inline constexpr std::string_view kSplitFile = "split.json";

struct DatasetFiles {
  std::string scenes;
  std::string instructions;
  std::string split;
};

DatasetFiles serialize_dataset(const CabDataset& ds);
void export_dataset(const CabDataset& ds, const std::filesystem::path& dir);
// Throws ValidationError naming the file and line on any bad record.
CabDataset import_dataset(const std::filesystem::path& dir);

// Digest over the three exported files in a fixed order. The in-memory
// overloads agree with the on-disk one for an exported dataset.
std::string dataset_digest(const DatasetFiles& files);
std::string dataset_digest(const CabDataset& ds);
std::string dataset_digest(const std::filesystem::path& dir);

}  // namespace vground
