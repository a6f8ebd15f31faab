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

// Per-episode trace: grounding, the clarify/act decision and the rollout.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "vground/cab_bench.hpp"
#include "vground/policy.hpp"

namespace vground {

enum class Decision { act, clarify };

std::string_view to_string(Decision d);

struct StepRecord {
  Vec3 gripper = Vec3::Zero();  // before the action
  ActionVector action;
  PickStatus status = PickStatus::moved;
};

struct EpisodeLog {
  int episode_id = 0;
  int instruction_id = 0;
  int scene_id = 0;
  Split split = Split::test;
  std::string instruction;
  std::string subgoal;  // canonical template
  AmbiguityLabel label = AmbiguityLabel::unambiguous;
  std::set<int> referent_ids;

  // Grounding.
  int planner_invocations = 0;
  bool grounding_failed = false;
  std::vector<int> resolved_ids;
  std::optional<int> tiebreak_id;
  std::vector<int> entity_ids;  // attention rows, in order
  Eigen::VectorXd logits;
  Eigen::VectorXd alpha;
  Eigen::VectorXd goal;
  double entropy = 0.0;
  int argmax_entity = -1;

  // Policy input layout as seen by the fast policy.
  std::vector<PolicyField> policy_fields;
  Eigen::VectorXd observation;

  // Rollout, executed regardless of the decision so the outcome of acting is
  // known for every episode.
  std::vector<StepRecord> steps;
  PickStatus final_status = PickStatus::moved;
  std::optional<int> grasped_id;
  bool act_success = false;

  // Selective decision.
  double threshold = 0.0;
  Decision decision = Decision::act;
  bool succeeded = false;

  bool ambiguous() const { return label == AmbiguityLabel::ambiguous; }
  bool clarified() const { return decision == Decision::clarify; }
  // Argmax entity is the unique referent.
  bool grounding_correct() const;
};

nlohmann::json to_json(const EpisodeLog& e);
EpisodeLog episode_from_json(const nlohmann::json& j);

std::string episodes_to_jsonl(const std::vector<EpisodeLog>& logs);
// Throws ValidationError naming the line on malformed records.
std::vector<EpisodeLog> episodes_from_jsonl(std::string_view text);

}  // namespace vground
