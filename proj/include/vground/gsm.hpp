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

// Grounded state: per-object entity nodes, a bounded FIFO entity memory and
// the entity set handed to cross attention.

#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include <json.hpp>

#include "vground/types.hpp"
#include "vground/world_sim.hpp"

namespace vground {

inline constexpr int kEntityDim = 32;
inline constexpr int kNoiseChannelDim = 4;
// attr one-hot, position, noise channel, bias.
inline constexpr int kEncoderInputDim = kAttributeDim + 3 + kNoiseChannelDim + 1;
inline constexpr std::size_t kDefaultMemoryCapacity = 16;

struct EntityNode {
  int id = 0;
  Vec3 position = Vec3::Zero();
  AttributeVector attr = AttributeVector::Zero();
  Eigen::VectorXd appearance;  // unit norm, kEntityDim
  int birth_step = 0;
  double confidence = 0.0;     // in (0, 1]; larger is nearer the camera
};

struct SceneGraph {
  int step = 0;
  std::vector<EntityNode> nodes;
};

struct EncoderParams {
  // kEntityDim x kEncoderInputDim.
  Eigen::MatrixXd weight;

  static EncoderParams random(std::uint64_t seed, double scale = 0.5);
};

// Raw encoder input for one object; the noise channel carries photometric
// perturbations.
Eigen::VectorXd encoder_input(const WorldObject& obj, const Eigen::Vector<double, kNoiseChannelDim>& noise);

// Noise channel for object `object_id` under p (zero for geometric kinds).
Eigen::Vector<double, kNoiseChannelDim> noise_channel(const Perturbation* p, int object_id);

double detection_confidence(const Vec3& position);

// One node per object in scene order. Geometric perturbations move the
// objects first; photometric ones enter only through the noise channel.
SceneGraph encode_entities(const Scene& scene, const std::optional<Perturbation>& p,
                           const EncoderParams& params, int step = 0);

struct EncoderCache {
  Eigen::VectorXd input;
  Eigen::VectorXd pre_norm;
  Eigen::VectorXd output;
};

// Normalized linear map for a single input, with the cache for backward.
Eigen::VectorXd encode_appearance(const Eigen::VectorXd& input, const EncoderParams& params,
                                  EncoderCache* cache = nullptr);

// Accumulates d(loss)/d(weight) given d(loss)/d(appearance).
void encoder_backward(const Eigen::VectorXd& grad_appearance, const EncoderCache& cache,
                      Eigen::MatrixXd& grad_weight);

class EntityMemory {
 public:
  explicit EntityMemory(std::size_t capacity = kDefaultMemoryCapacity);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const std::deque<EntityNode>& nodes() const { return nodes_; }

  // Appends every node of the graph, then evicts lowest birth_step first
  // (insertion order among equal birth steps) until within capacity.
  void update(const SceneGraph& graph);

 private:
  std::size_t capacity_;
  std::deque<EntityNode> nodes_;
};

EntityMemory update_memory(EntityMemory memory, const SceneGraph& graph);

struct EntitySet {
  std::vector<EntityNode> entities;
  Eigen::MatrixXd embeddings;  // one row per entity

  std::size_t size() const { return entities.size(); }
  std::vector<int> ids() const;
};

// Current-frame nodes first, then memory nodes whose id is absent from the
// frame (latest copy per id). Throws ValidationError when both are empty.
EntitySet assemble_entity_set(const SceneGraph& graph, const EntityMemory& memory);

EntitySet make_entity_set(std::vector<EntityNode> nodes);

nlohmann::json to_json(const EntitySet& set);

}  // namespace vground
