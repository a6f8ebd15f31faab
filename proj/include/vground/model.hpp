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

// The assembled grounding model: entity encoder, cross attention, the fast
// policy and two probe policies used for the language-influence comparison.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vground/gsm.hpp"
#include "vground/planner.hpp"
#include "vground/policy.hpp"
#include "vground/saca.hpp"

namespace vground {

enum class Ablation { full, no_gac, no_planner, no_gsm, lang_to_fast };

std::string_view to_string(Ablation a);
std::optional<Ablation> parse_ablation(std::string_view s);

// no_gsm replaces entity rows with a kPatchGrid x kPatchGrid grid of table
// patches. Patch ids are negative so they never collide with object ids.
inline constexpr int kPatchGrid = 3;
int patch_cell(const Vec3& position);
inline int patch_id(int cell) { return -(cell + 1); }

// Attention rows are the appearance embedding followed by the entity's
// position in table-centred decimetres.
inline constexpr int kRowDim = kEntityDim + 3;
inline constexpr double kPositionScale = 10.0;
Eigen::Vector3d metric_position(const Vec3& p);

// Rows handed to cross attention plus what backward needs.
struct StateRows {
  std::vector<int> ids;
  std::vector<Vec3> positions;
  Eigen::MatrixXd rows;  // n x kRowDim
  std::vector<EncoderCache> caches;

  int index_of(int id) const;  // -1 when absent
};

struct Model {
  Ablation ablation = Ablation::full;
  EncoderParams encoder;
  SacaParams saca;
  PolicyParams policy;
  PolicyParams probe_subgoal;
  PolicyParams probe_instruction;

  static Model create(Ablation ablation, std::uint64_t seed, double attention_scale = 0.3,
                      double encoder_scale = 0.5);

  bool entity_centric() const { return ablation != Ablation::no_gsm; }
  PolicyConditioning conditioning() const;
  int query_dim() const;
  // Throws ValidationError when the parameter shapes are inconsistent.
  void validate() const;
};

int policy_input_dim(PolicyConditioning c);

// Sub-goal query features: template slots, or the raw instruction for
// no_planner. Throws ParseError outside the grammar.
Eigen::VectorXd query_features(Ablation ablation, std::span<const std::string> tokens);

// Encodes the (possibly perturbed) scene as attention rows: one per object,
// or one per patch for no_gsm.
StateRows observe_state(const Model& model, const Scene& scene,
                        const std::optional<Perturbation>& p = std::nullopt);

// Row id the alignment target maps to (the object itself, or its patch).
int row_id_for(const Model& model, const Scene& scene, int object_id);

// Fast-policy input. The instruction reaches the policy only under
// lang_to_fast; every other configuration drops it here.
PolicyInput policy_input(const Model& model, const Eigen::VectorXd& goal, const Scene& observed,
                         const Vec3& gripper, std::span<const std::string> tokens);

// Probe inputs: observation, gripper and either template or instruction
// features, with no grounding.
PolicyInput probe_input(PolicyConditioning c, const Scene& observed, const Vec3& gripper,
                        std::span<const std::string> tokens);

inline constexpr int kCheckpointVersion = 1;

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Model& m);
Model model_from_json(const nlohmann::json& j);

}  // namespace vground
