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

#include "vground/episode.hpp"

#include <sstream>

#include "vground/errors.hpp"

namespace vground {

using nlohmann::json;

std::string_view to_string(Decision d) { return d == Decision::act ? "act" : "clarify"; }

bool EpisodeLog::grounding_correct() const {
  return !ambiguous() && referent_ids.size() == 1 && *referent_ids.begin() == argmax_entity;
}

namespace {

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from(const json& j) {
  const auto d = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
}

std::optional<PickStatus> parse_pick_status(std::string_view s) {
  for (auto v : {PickStatus::moved, PickStatus::grasped, PickStatus::missed, PickStatus::ambiguous}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

}  // namespace

json to_json(const EpisodeLog& e) {
  json steps = json::array();
  for (const auto& s : e.steps) {
    steps.push_back({{"gripper", vec_to_json(s.gripper)},
                     {"delta", vec_to_json(s.action.delta)},
                     {"grip", s.action.grip},
                     {"status", to_string(s.status)}});
  }
  json fields = json::array();
  for (const auto& f : e.policy_fields) {
    fields.push_back({{"name", f.name}, {"source", to_string(f.source)}, {"offset", f.offset},
                      {"dim", f.dim}});
  }
  json j = {{"episode_id", e.episode_id},
            {"instruction_id", e.instruction_id},
            {"scene_id", e.scene_id},
            {"split", to_string(e.split)},
            {"instruction", e.instruction},
            {"subgoal", e.subgoal},
            {"label", to_string(e.label)},
            {"referent_ids", e.referent_ids},
            {"planner_invocations", e.planner_invocations},
            {"grounding_failed", e.grounding_failed},
            {"resolved_ids", e.resolved_ids},
            {"entity_ids", e.entity_ids},
            {"logits", vector_json(e.logits)},
            {"alpha", vector_json(e.alpha)},
            {"goal", vector_json(e.goal)},
            {"entropy", e.entropy},
            {"argmax_entity", e.argmax_entity},
            {"policy_fields", fields},
            {"observation", vector_json(e.observation)},
            {"steps", steps},
            {"final_status", to_string(e.final_status)},
            {"act_success", e.act_success},
            {"threshold", e.threshold},
            {"decision", to_string(e.decision)},
            {"succeeded", e.succeeded}};
  j["tiebreak_id"] = e.tiebreak_id ? json(*e.tiebreak_id) : json(nullptr);
  j["grasped_id"] = e.grasped_id ? json(*e.grasped_id) : json(nullptr);
  return j;
}

EpisodeLog episode_from_json(const json& j) {
  EpisodeLog e;
  e.episode_id = j.at("episode_id").get<int>();
  e.instruction_id = j.at("instruction_id").get<int>();
  e.scene_id = j.at("scene_id").get<int>();
  auto split = parse_split(j.at("split").get<std::string>());
  auto label = parse_ambiguity_label(j.at("label").get<std::string>());
  auto status = parse_pick_status(j.at("final_status").get<std::string>());
  const auto decision = j.at("decision").get<std::string>();
  if (!split || !label || !status || (decision != "act" && decision != "clarify")) {
    throw ValidationError("episode record has an unknown enum value");
  }
  e.split = *split;
  e.label = *label;
  e.final_status = *status;
  e.decision = decision == "act" ? Decision::act : Decision::clarify;
  e.instruction = j.at("instruction").get<std::string>();
  e.subgoal = j.at("subgoal").get<std::string>();
  e.referent_ids = j.at("referent_ids").get<std::set<int>>();
  e.planner_invocations = j.at("planner_invocations").get<int>();
  e.grounding_failed = j.at("grounding_failed").get<bool>();
  e.resolved_ids = j.at("resolved_ids").get<std::vector<int>>();
  e.entity_ids = j.at("entity_ids").get<std::vector<int>>();
  e.logits = vector_from(j.at("logits"));
  e.alpha = vector_from(j.at("alpha"));
  e.goal = vector_from(j.at("goal"));
  e.entropy = j.at("entropy").get<double>();
  e.argmax_entity = j.at("argmax_entity").get<int>();
  for (const auto& f : j.at("policy_fields")) {
    auto src = parse_input_source(f.at("source").get<std::string>());
    if (!src) throw ValidationError("episode record has an unknown input source");
    e.policy_fields.push_back(
        {f.at("name").get<std::string>(), *src, f.at("offset").get<int>(), f.at("dim").get<int>()});
  }
  e.observation = vector_from(j.at("observation"));
  for (const auto& s : j.at("steps")) {
    StepRecord r;
    r.gripper = vec_from_json(s.at("gripper"));
    r.action.delta = vec_from_json(s.at("delta"));
    r.action.grip = s.at("grip").get<double>();
    auto st = parse_pick_status(s.at("status").get<std::string>());
    if (!st) throw ValidationError("episode step has an unknown status");
    r.status = *st;
    e.steps.push_back(r);
  }
  e.act_success = j.at("act_success").get<bool>();
  e.threshold = j.at("threshold").get<double>();
  e.succeeded = j.at("succeeded").get<bool>();
  if (!j.at("tiebreak_id").is_null()) e.tiebreak_id = j.at("tiebreak_id").get<int>();
  if (!j.at("grasped_id").is_null()) e.grasped_id = j.at("grasped_id").get<int>();
  return e;
}

std::string episodes_to_jsonl(const std::vector<EpisodeLog>& logs) {
  std::string out;
  for (const auto& e : logs) out += to_json(e).dump() + "\n";
  return out;
}

std::vector<EpisodeLog> episodes_from_jsonl(std::string_view text) {
  std::vector<EpisodeLog> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(episode_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ValidationError("episodes.jsonl:" + std::to_string(n) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("episodes.jsonl:" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace vground
