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

#include "vground/gsm.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "vground/errors.hpp"
#include "vground/rng.hpp"

namespace vground {

namespace {

// Fixed camera above the far table edge; confidence decays with distance.
const Vec3 kCameraPosition(0.5, -0.3, 0.6);

Eigen::Vector<double, kNoiseChannelDim> unit_direction(Rng& rng) {
  Eigen::Vector<double, kNoiseChannelDim> v;
  do {
    for (int i = 0; i < kNoiseChannelDim; ++i) v(i) = rng.normal();
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

}  // namespace

EncoderParams EncoderParams::random(std::uint64_t seed, double scale) {
  Rng rng = Rng::derive(seed, {0xE4C0});
  EncoderParams p;
  p.weight.resize(kEntityDim, kEncoderInputDim);
  for (int r = 0; r < p.weight.rows(); ++r) {
    for (int c = 0; c < p.weight.cols(); ++c) p.weight(r, c) = scale * rng.normal();
  }
  return p;
}

Eigen::VectorXd encoder_input(const WorldObject& obj,
                              const Eigen::Vector<double, kNoiseChannelDim>& noise) {
  Eigen::VectorXd x(kEncoderInputDim);
  x.head<kAttributeDim>() = one_hot(obj.attrs);
  x.segment<3>(kAttributeDim) = obj.position;
  x.segment<kNoiseChannelDim>(kAttributeDim + 3) = noise;
  x(kEncoderInputDim - 1) = 1.0;
  return x;
}

Eigen::Vector<double, kNoiseChannelDim> noise_channel(const Perturbation* p,
                                                      int object_id) {
  Eigen::Vector<double, kNoiseChannelDim> n = Eigen::Vector<double, kNoiseChannelDim>::Zero();
  if (!p || p->geometric() || p->magnitude == 0.0) return n;
  if (p->kind == PerturbationKind::lighting) {
    // Global illumination shift: one direction shared by all objects.
    Rng rng = Rng::derive(p->seed, {0x116});
    return p->magnitude * unit_direction(rng);
  }
  Rng rng = Rng::derive(p->seed, {0xF0, static_cast<std::uint64_t>(object_id)});
  return p->magnitude * unit_direction(rng);
}

double detection_confidence(const Vec3& position) {
  return 1.0 / (1.0 + (position - kCameraPosition).norm());
}

Eigen::VectorXd encode_appearance(const Eigen::VectorXd& input,
                                  const EncoderParams& params,
                                  EncoderCache* cache) {
  Eigen::VectorXd u = params.weight * input;
  const double n = u.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw NumericalError("entity encoder produced a zero or non-finite vector");
  }
  Eigen::VectorXd e = u / n;
  if (cache) {
    cache->input = input;
    cache->pre_norm = std::move(u);
    cache->output = e;
  }
  return e;
}

void encoder_backward(const Eigen::VectorXd& grad_appearance,
                      const EncoderCache& cache, Eigen::MatrixXd& grad_weight) {
  const double n = cache.pre_norm.norm();
  const Eigen::VectorXd du =
      (grad_appearance - cache.output * cache.output.dot(grad_appearance)) / n;
  grad_weight.noalias() += du * cache.input.transpose();
}

SceneGraph encode_entities(const Scene& scene, const std::optional<Perturbation>& p,
                           const EncoderParams& params, int step) {
  const Scene* view = &scene;
  PerturbedScene moved;
  if (p && p->geometric()) {
    moved = apply_perturbation(scene, *p);
    view = &moved.scene;
  } else if (p && !(p->magnitude >= 0.0)) {
    throw ValidationError("perturbation magnitude must be >= 0");
  }
  const Perturbation* photometric = (p && !p->geometric()) ? &*p : nullptr;

  SceneGraph g;
  g.step = step;
  g.nodes.reserve(view->objects.size());
  for (const auto& obj : view->objects) {
    EntityNode node;
    node.id = obj.id;
    node.position = obj.position;
    node.attr = one_hot(obj.attrs);
    node.appearance =
        encode_appearance(encoder_input(obj, noise_channel(photometric, obj.id)), params);
    node.birth_step = step;
    node.confidence = detection_confidence(obj.position);
    g.nodes.push_back(std::move(node));
  }
  return g;
}

EntityMemory::EntityMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ValidationError("memory capacity must be positive");
}

void EntityMemory::update(const SceneGraph& graph) {
  for (const auto& n : graph.nodes) nodes_.push_back(n);
  while (nodes_.size() > capacity_) {
    auto oldest = std::min_element(
        nodes_.begin(), nodes_.end(),
        [](const EntityNode& a, const EntityNode& b) { return a.birth_step < b.birth_step; });
    nodes_.erase(oldest);
  }
}

EntityMemory update_memory(EntityMemory memory, const SceneGraph& graph) {
  memory.update(graph);
  return memory;
}

std::vector<int> EntitySet::ids() const {
  std::vector<int> out;
  out.reserve(entities.size());
  for (const auto& e : entities) out.push_back(e.id);
  return out;
}

EntitySet make_entity_set(std::vector<EntityNode> nodes) {
  EntitySet set;
  set.entities = std::move(nodes);
  const int n = static_cast<int>(set.entities.size());
  const int d = n > 0 ? static_cast<int>(set.entities.front().appearance.size()) : 0;
  set.embeddings.resize(n, d);
  for (int i = 0; i < n; ++i) {
    const auto& a = set.entities[i].appearance;
    if (a.size() != d || !a.allFinite()) {
      throw ValidationError("entity embeddings must be finite and equally sized");
    }
    set.embeddings.row(i) = a.transpose();
  }
  return set;
}

EntitySet assemble_entity_set(const SceneGraph& graph, const EntityMemory& memory) {
  if (graph.nodes.empty() && memory.empty()) {
    throw ValidationError("empty scene graph and empty memory: no state to ground");
  }
  std::vector<EntityNode> nodes = graph.nodes;
  std::unordered_set<int> seen;
  for (const auto& n : nodes) seen.insert(n.id);

  // Latest memory copy per id, kept at the position of that copy.
  std::unordered_map<int, std::size_t> latest;
  const auto& mem = memory.nodes();
  for (std::size_t i = 0; i < mem.size(); ++i) {
    if (seen.count(mem[i].id)) continue;
    auto it = latest.find(mem[i].id);
    if (it == latest.end() || mem[it->second].birth_step <= mem[i].birth_step) {
      latest[mem[i].id] = i;
    }
  }
  for (std::size_t i = 0; i < mem.size(); ++i) {
    auto it = latest.find(mem[i].id);
    if (it != latest.end() && it->second == i) nodes.push_back(mem[i]);
  }
  return make_entity_set(std::move(nodes));
}

nlohmann::json to_json(const EntitySet& set) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : set.entities) {
    arr.push_back({{"id", e.id},
                   {"position", vec_to_json(e.position)},
                   {"birth_step", e.birth_step},
                   {"confidence", e.confidence}});
  }
  return arr;
}

}  // namespace vground
