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

// Deterministic tabletop world: attributed objects on a unit table, a
// point gripper, parametric observation perturbations and scripted reaches.
//
// Units are meters. The table occupies [0,1]x[0,1]x[0,0.3]. Perturbation
// magnitudes are an internal convention: radians of rotation about the
// vertical axis through the table center for `viewpoint`, meters of maximum
// displacement for `layout`, and feature-channel amplitude for `lighting`
// and `feature_noise`.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vground/types.hpp"

namespace vground {

inline constexpr double kTableMax[3] = {1.0, 1.0, 0.3};
inline constexpr double kGraspRadius = 0.03;
inline constexpr double kMaxStepLength = 0.1;

struct WorldObject {
  int id = 0;
  ObjectAttributes attrs;
  Vec3 position = Vec3::Zero();
};

struct Scene {
  int id = 0;
  std::vector<WorldObject> objects;
  Vec3 gripper_position = Vec3(0.5, 0.5, 0.25);
  std::uint64_t rng_seed = 0;

  const WorldObject* find(int object_id) const;
};

struct SceneConfig {
  int min_objects = 3;
  int max_objects = 6;
  // Weights for counts min_objects..max_objects; mean 4.8 by default.
  std::vector<double> object_count_weights = {0.1, 0.25, 0.4, 0.25};
  // Forces the object count when set (used for stratified corpora).
  std::optional<int> object_count;
  std::vector<double> category_weights = {1, 1, 1, 1};
  std::vector<double> color_weights = {1, 1, 1, 1};
  std::vector<double> size_weights = {1, 1};
  double min_separation = 0.08;
  // Objects are placed in [margin, 1-margin]^2 so that any viewpoint rotation
  // about the table center keeps them on the table.
  double margin = 0.15;
  int max_retries = 200;
  Vec3 gripper_start = Vec3(0.5, 0.5, 0.25);

  void validate() const;
};

// Height of an object's grasp point above the table.
double object_height(Size s);

// Throws GenerationError when rejection sampling cannot place the objects.
Scene generate_scene(std::uint64_t seed, const SceneConfig& config, int scene_id = 0);

enum class PerturbationKind { viewpoint, layout, lighting, feature_noise };

std::string_view to_string(PerturbationKind k);
std::optional<PerturbationKind> parse_perturbation_kind(std::string_view s);

struct Perturbation {
  PerturbationKind kind = PerturbationKind::viewpoint;
  double magnitude = 0.0;
  // Rotation sense for viewpoint; the group inverse flips it.
  bool reversed = false;
  std::uint64_t seed = 0;

  Perturbation inverse() const;
  bool geometric() const {
    return kind == PerturbationKind::viewpoint || kind == PerturbationKind::layout;
  }
};

// Product of two viewpoint rotations. Magnitude is |a ± b| <= a + b.
Perturbation compose_viewpoint(const Perturbation& a, const Perturbation& b);

struct PerturbedScene {
  Scene scene;
  // Set when some object had to be clamped back onto the table.
  bool clamped = false;
};

// Throws ValidationError for negative magnitudes.
PerturbedScene apply_perturbation(const Scene& scene, const Perturbation& p);

enum class PickStatus { moved, grasped, missed, ambiguous };

std::string_view to_string(PickStatus s);

struct StepOutcome {
  Vec3 gripper = Vec3::Zero();
  std::optional<int> grasped_id;
  PickStatus status = PickStatus::moved;

  bool success() const { return status == PickStatus::grasped; }
};

// Moves the gripper by action.delta (clamped to the table volume) and, when
// the grip command is closed, grasps iff exactly one object lies within the
// grasp radius.
StepOutcome execute_pick(const Scene& scene, const ActionVector& action);

struct TrajectoryStep {
  Vec3 gripper = Vec3::Zero();
  ActionVector action;
};

struct Trajectory {
  int scene_id = 0;
  int target_id = 0;
  std::vector<TrajectoryStep> steps;
  Vec3 final_gripper = Vec3::Zero();
};

// Expert action from any gripper position: a full step toward the target,
// or the exact remaining offset with the grip closed once within one step.
ActionVector expert_step(const Vec3& gripper, const Vec3& target);

// Straight-line reach following expert_step, grip on the final step. Throws ValidationError if the target is missing or off the table.
Trajectory scripted_demonstration(const Scene& scene, int target_id);

// Replays a trajectory through execute_pick starting from scene's gripper.
StepOutcome replay(const Scene& scene, const Trajectory& trajectory);

bool inside_table(const Vec3& p);

// JSONL records. One scene per line; one trajectory step per line.
nlohmann::json to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& j);
std::vector<nlohmann::json> trajectory_to_jsonl(const Trajectory& t);
Trajectory trajectory_from_jsonl(const std::vector<nlohmann::json>& lines);

nlohmann::json vec_to_json(const Vec3& v);
Vec3 vec_from_json(const nlohmann::json& j);

}  // namespace vground
