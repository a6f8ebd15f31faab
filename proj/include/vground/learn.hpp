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

// Alignment pairs, the training objective and the trainer.
//
//   L_total = L_action + lambda * L_GAC
//
// L_action averages ||a - a*||^2 over the supervised states of a batch and
// L_GAC averages the contrastive loss over its instructions.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vground/cab_bench.hpp"
#include "vground/model.hpp"
#include "vground/rng.hpp"

namespace vground {

struct AlignmentPair {
  SymbolicSubGoal subgoal;
  int positive_entity_id = 0;
  int scene_ref = 0;
  int t_end = 0;
  bool label_noise_flag = false;
};

// Positive = tracked entity nearest the final gripper position (ties to the
// lowest id). With probability segmenter_noise the positive is swapped for
// another entity and flagged. `tracks` holds one graph per step; the graph
// whose step equals the trajectory length is used. Throws ValidationError
// when no entities are tracked at that step.
std::vector<AlignmentPair> generate_alignment_pairs(const Trajectory& trajectory,
                                                    const SymbolicSubGoal& subgoal,
                                                    std::span<const SceneGraph> tracks,
                                                    double segmenter_noise, Rng& rng);

struct TrainConfig {
  double lambda = 0.1;
  double tau = 0.07;
  double lr = 0.05;
  double momentum = 0.9;
  int steps = 12000;
  int batch_n = 8;
  int minibatch = 32;
  std::uint64_t seed = 0;
  Ablation ablation = Ablation::full;
  double segmenter_noise = 0.0;
  // Extra gripper states per instruction relabelled by the expert.
  int augment_states = 4;
  double augment_sigma = 0.08;
  // Each sampled scene is re-laid out by up to this many meters per object,
  // with expert actions recomputed toward the moved target.
  double layout_jitter = 0.0;
  double attention_init_scale = 1.0;
  double encoder_init_scale = 0.5;
  double grad_clip = 5.0;
  // Ambiguous instructions have no single expert; by default they only
  // enter the contrastive term.
  bool imitate_ambiguous = false;
  bool train_probes = true;
  int curve_every = 50;

  // Throws ValidationError naming the offending key.
  void validate() const;
  // Sorted key=value lines; the config hash digests this text.
  std::string canonical() const;
  std::string hash() const;
  // Unknown keys and malformed values throw ValidationError.
  static TrainConfig from_kv(const std::map<std::string, std::string>& kv);
};

struct LossReport {
  int step = 0;
  double action_loss = 0.0;
  double gac_loss = 0.0;
  double total = 0.0;
  int batch_n = 0;
};

// One supervised instruction with its contrastive negatives fixed.
struct TrainingItem {
  const Scene* scene = nullptr;
  std::vector<std::string> tokens;
  int positive_object_id = 0;
  // Negatives from other scenes: (scene, object id).
  std::vector<std::pair<const Scene*, int>> foreign_negatives;
  // Gripper states and the expert action at each; may be empty.
  std::vector<std::pair<Vec3, ActionVector>> states;
};

struct ModelGradients {
  Eigen::MatrixXd encoder;
  Eigen::MatrixXd query;
  Eigen::MatrixXd key;
  Eigen::MatrixXd value;
  PolicyGradients policy;
  PolicyGradients probe_subgoal;
  PolicyGradients probe_instruction;
  double action_loss = 0.0;
  double gac_loss = 0.0;
  double probe_loss = 0.0;

  static ModelGradients zeros(const Model& m);
  void add(const ModelGradients& o, double w);
  double squared_norm() const;
};

// Loss and exact gradients of one item. The contrastive term uses the
// positive row, the other rows of the same scene and the foreign negatives,
// truncated to batch_n candidates.
ModelGradients item_gradients(const Model& model, const TrainingItem& item,
                              const TrainConfig& config);

// Total loss of one item (action + lambda * gac), for gradient checks.
double item_loss(const Model& model, const TrainingItem& item, const TrainConfig& config);

struct TrainResult {
  Model model;
  std::vector<LossReport> curve;
};

// Deterministic in config.seed. Throws NumericalError with a JSON
// diagnostic when the loss becomes non-finite.
TrainResult train(const TrainConfig& config, const CabDataset& dataset);

std::string curve_csv(const std::vector<LossReport>& curve);

struct Checkpoint {
  int version = kCheckpointVersion;
  TrainConfig config;
  std::string config_hash;
  std::string dataset_digest;
  Model model;
};

nlohmann::json to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(const nlohmann::json& j);
void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path);
// Throws ValidationError on version or config-hash mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace vground
