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

#include "vground/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include "vground/errors.hpp"

namespace vground {

Grounded ground(const Model& model, const Scene& scene, std::span<const std::string> tokens,
                const std::optional<Perturbation>& perturbation) {
  Grounded g;
  g.observed = (perturbation && perturbation->geometric())
                   ? apply_perturbation(scene, *perturbation).scene
                   : scene;

  const SceneGraph graph = encode_entities(scene, perturbation, model.encoder, 0);
  EntityMemory memory;
  g.entities = assemble_entity_set(graph, memory);
  memory.update(graph);

  g.subgoal = extract_template(tokens);
  g.planner_invocations = 1;
  g.candidates = resolve_template(g.subgoal, g.entities);
  if (g.candidates.empty()) {
    // One retry against the memory-backed state, then give up.
    g.subgoal = extract_template(tokens);
    g.planner_invocations = 2;
    g.candidates = resolve_template(g.subgoal, assemble_entity_set(graph, memory));
  }

  g.rows = observe_state(model, scene, perturbation);
  g.attention = saca_forward(query_features(model.ablation, tokens), g.rows.rows, g.rows.ids,
                             model.saca);
  return g;
}

ActionVector act(const Model& model, const Eigen::VectorXd& goal, const Scene& observed,
                 const Vec3& gripper, std::span<const std::string> tokens) {
  return policy_forward(policy_input(model, goal, observed, gripper, tokens), model.policy).action;
}

EpisodeLog run_episode(const Model& model, const Scene& scene, const CabInstruction& instruction,
                       const EpisodeOptions& options) {
  const auto& tokens = instruction.instruction.tokens;
  Scene start = scene;
  if (options.gripper_start) start.gripper_position = *options.gripper_start;
  const Grounded g = ground(model, start, tokens, options.perturbation);

  EpisodeLog log;
  log.episode_id = instruction.instruction_id;
  log.instruction_id = instruction.instruction_id;
  log.scene_id = instruction.scene_id;
  log.split = instruction.split;
  log.instruction = instruction.instruction.text();
  log.subgoal = g.subgoal.canonical();
  log.label = instruction.instruction.label;
  log.referent_ids = instruction.instruction.referent_ids;
  log.planner_invocations = g.planner_invocations;
  log.grounding_failed = g.candidates.empty();
  for (const auto& c : g.candidates) log.resolved_ids.push_back(c.id);
  if (!g.candidates.empty()) log.tiebreak_id = tiebreak_by_confidence(g.candidates).id;
  log.entity_ids = g.rows.ids;
  log.logits = g.attention.goal.logits;
  log.alpha = g.attention.goal.alpha;
  log.goal = g.attention.goal.g;
  log.entropy = g.attention.goal.entropy;
  log.argmax_entity = g.attention.goal.argmax_entity;

  Scene world = g.observed;
  const PolicyInput first = policy_input(model, log.goal, world, world.gripper_position, tokens);
  log.policy_fields = first.fields();
  log.observation = first.observation;

  for (int t = 0; t < options.horizon; ++t) {
    StepRecord rec;
    rec.gripper = world.gripper_position;
    rec.action = act(model, log.goal, world, world.gripper_position, tokens);
    const StepOutcome out = execute_pick(world, rec.action);
    rec.status = out.status;
    log.steps.push_back(rec);
    world.gripper_position = out.gripper;
    log.final_status = out.status;
    log.grasped_id = out.grasped_id;
    if (rec.action.grip_closed()) break;
  }
  log.act_success = !log.ambiguous() && log.final_status == PickStatus::grasped &&
                    log.grasped_id && log.referent_ids.count(*log.grasped_id) > 0;
  log.decision = Decision::act;
  log.succeeded = log.act_success;
  log.threshold = 0.0;
  return log;
}

std::vector<EpisodeLog> run_split(const Model& model, const CabDataset& dataset, Split split,
                                  const EpisodeOptions& options, int workers) {
  const auto ins = dataset.instructions_in(split);
  std::vector<EpisodeLog> logs(ins.size());
  std::vector<std::exception_ptr> errors(ins.size());
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < ins.size(); i += stride) {
      try {
        logs[i] = run_episode(model, dataset.scene(ins[i]->scene_id).scene, *ins[i], options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n = static_cast<std::size_t>(std::max(1, workers));
  if (n == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(work, w, n);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return logs;
}

int env_workers() {
  const char* v = std::getenv("VGROUND_WORKERS");
  if (!v) return 1;
  const int n = std::atoi(v);
  if (n < 1) throw ValidationError("VGROUND_WORKERS must be a positive integer");
  return n;
}

}  // namespace vground
