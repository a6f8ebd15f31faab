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

// One episode end to end: planner, grounded state, cross attention, the
// fast policy in closed loop, and the episode log.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vground/cab_bench.hpp"
#include "vground/episode.hpp"
#include "vground/model.hpp"

namespace vground {

inline constexpr int kDefaultHorizon = 15;

struct EpisodeOptions {
  std::optional<Perturbation> perturbation;
  int horizon = kDefaultHorizon;
  // Gripper start override; the scene's own start otherwise.
  std::optional<Vec3> gripper_start;
};

struct Grounded {
  SymbolicSubGoal subgoal;
  int planner_invocations = 0;
  CandidateSet candidates;
  EntitySet entities;   // grounded state from the entity memory
  StateRows rows;       // what cross attention attends over
  SacaResult attention;
  Scene observed;       // scene after geometric perturbation
};

// Runs the planner (re-invoked once when resolution is empty), assembles
// the entity set through the FIFO memory and applies cross attention.
Grounded ground(const Model& model, const Scene& scene, std::span<const std::string> tokens,
                const std::optional<Perturbation>& perturbation = std::nullopt);

// First action of the fast policy from the given gripper position. The
// instruction is passed through but only lang_to_fast lets it in.
ActionVector act(const Model& model, const Eigen::VectorXd& goal, const Scene& observed,
                 const Vec3& gripper, std::span<const std::string> tokens);

// Runs the full episode; the decision fields are left at act with
// succeeded = act_success until a selective policy is applied.
EpisodeLog run_episode(const Model& model, const Scene& scene, const CabInstruction& instruction,
                       const EpisodeOptions& options = {});

// Every instruction of a split, in instruction order. Work is spread over
// `workers` threads; results do not depend on the worker count.
std::vector<EpisodeLog> run_split(const Model& model, const CabDataset& dataset, Split split,
                                  const EpisodeOptions& options = {}, int workers = 1);

// Worker count from VGROUND_WORKERS, default 1.
int env_workers();

}  // namespace vground
