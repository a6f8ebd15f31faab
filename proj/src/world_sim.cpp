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

#include "vground/world_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "vground/errors.hpp"
#include "vground/rng.hpp"

namespace vground {

namespace {

int draw_weighted(Rng& rng, const std::vector<double>& weights) {
  std::discrete_distribution<int> dist(weights.begin(), weights.end());
  return dist(rng.engine());
}

void check_weights(const std::vector<double>& w, std::size_t n,
                   const char* what) {
  if (w.size() != n) {
    throw ValidationError(std::string(what) + " needs " + std::to_string(n) +
                          " weights");
  }
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw ValidationError(std::string(what) + " has a negative weight");
    }
    total += x;
  }
  if (total <= 0.0) {
    throw ValidationError(std::string(what) + " weights sum to zero");
  }
}

Vec3 clamp_to_table(const Vec3& p, bool* clamped) {
  Vec3 out = p;
  for (int i = 0; i < 3; ++i) {
    const double c = std::clamp(p(i), 0.0, kTableMax[i]);
    if (c != p(i) && clamped) *clamped = true;
    out(i) = c;
  }
  return out;
}

}  // namespace

const WorldObject* Scene::find(int object_id) const {
  for (const auto& o : objects) {
    if (o.id == object_id) return &o;
  }
  return nullptr;
}

void SceneConfig::validate() const {
  if (min_objects < 1 || max_objects < min_objects) {
    throw ValidationError("invalid object count range");
  }
  check_weights(object_count_weights,
                static_cast<std::size_t>(max_objects - min_objects + 1),
                "object_count_weights");
  check_weights(category_weights, kNumCategories, "category_weights");
  check_weights(color_weights, kNumColors, "color_weights");
  check_weights(size_weights, kNumSizes, "size_weights");
  if (object_count && (*object_count < min_objects || *object_count > max_objects)) {
    throw ValidationError("forced object count outside range");
  }
  if (!(min_separation >= 0.0) || !(margin >= 0.0) || margin >= 0.5) {
    throw ValidationError("invalid separation or margin");
  }
  if (!inside_table(gripper_start)) {
    throw ValidationError("gripper start is off the table");
  }
}

double object_height(Size s) { return s == Size::small ? 0.02 : 0.04; }

bool inside_table(const Vec3& p) {
  for (int i = 0; i < 3; ++i) {
    if (!(p(i) >= 0.0 && p(i) <= kTableMax[i])) return false;
  }
  return true;
}

Scene generate_scene(std::uint64_t seed, const SceneConfig& config,
                     int scene_id) {
  config.validate();
  Rng rng = Rng::derive(seed, {0x5CE7E});

  const int count = config.object_count
                        ? *config.object_count
                        : config.min_objects +
                              draw_weighted(rng, config.object_count_weights);

  Scene scene;
  scene.id = scene_id;
  scene.rng_seed = seed;
  scene.gripper_position = config.gripper_start;

  for (int i = 0; i < count; ++i) {
    WorldObject obj;
    obj.id = i;
    obj.attrs.category =
        static_cast<Category>(draw_weighted(rng, config.category_weights));
    obj.attrs.color = static_cast<Color>(draw_weighted(rng, config.color_weights));
    obj.attrs.size = static_cast<Size>(draw_weighted(rng, config.size_weights));

    bool placed = false;
    for (int attempt = 0; attempt < config.max_retries && !placed; ++attempt) {
      const Vec3 p(rng.uniform(config.margin, 1.0 - config.margin),
                   rng.uniform(config.margin, 1.0 - config.margin),
                   object_height(obj.attrs.size));
      placed = std::all_of(
          scene.objects.begin(), scene.objects.end(), [&](const WorldObject& o) {
            return (o.position.head<2>() - p.head<2>()).norm() >=
                   config.min_separation;
          });
      if (placed) obj.position = p;
    }
    if (!placed) {
      throw GenerationError("could not place object " + std::to_string(i) +
                            " after " + std::to_string(config.max_retries) +
                            " retries (table too crowded)");
    }
    scene.objects.push_back(obj);
  }
  return scene;
}

std::string_view to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::viewpoint: return "viewpoint";
    case PerturbationKind::layout: return "layout";
    case PerturbationKind::lighting: return "lighting";
    case PerturbationKind::feature_noise: return "feature_noise";
  }
  return "?";
}

std::optional<PerturbationKind> parse_perturbation_kind(std::string_view s) {
  for (auto k : {PerturbationKind::viewpoint, PerturbationKind::layout,
                 PerturbationKind::lighting, PerturbationKind::feature_noise}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

Perturbation Perturbation::inverse() const {
  if (kind != PerturbationKind::viewpoint) {
    throw ValidationError("only viewpoint perturbations have an inverse");
  }
  Perturbation p = *this;
  p.reversed = !reversed;
  return p;
}

Perturbation compose_viewpoint(const Perturbation& a, const Perturbation& b) {
  if (a.kind != PerturbationKind::viewpoint ||
      b.kind != PerturbationKind::viewpoint) {
    throw ValidationError("compose_viewpoint needs two viewpoint perturbations");
  }
  const double angle = (a.reversed ? -a.magnitude : a.magnitude) +
                       (b.reversed ? -b.magnitude : b.magnitude);
  Perturbation out = a;
  out.magnitude = std::abs(angle);
  out.reversed = angle < 0.0;
  return out;
}

PerturbedScene apply_perturbation(const Scene& scene, const Perturbation& p) {
  if (!(p.magnitude >= 0.0) || !std::isfinite(p.magnitude)) {
    throw ValidationError("perturbation magnitude must be finite and >= 0");
  }
  PerturbedScene out{scene, false};
  if (p.magnitude == 0.0 || !p.geometric()) return out;

  if (p.kind == PerturbationKind::viewpoint) {
    const double angle = p.reversed ? -p.magnitude : p.magnitude;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    for (auto& o : out.scene.objects) {
      const double x = o.position.x() - 0.5;
      const double y = o.position.y() - 0.5;
      o.position = clamp_to_table(
          Vec3(0.5 + c * x - s * y, 0.5 + s * x + c * y, o.position.z()),
          &out.clamped);
    }
    return out;
  }

  // Layout: each object moves in the table plane by at most `magnitude`.
  Rng rng = Rng::derive(p.seed, {scene.rng_seed, 0x1A707});
  for (auto& o : out.scene.objects) {
    const double theta = rng.uniform(0.0, 2.0 * M_PI);
    const double r = p.magnitude * rng.uniform();
    o.position = clamp_to_table(
        o.position + Vec3(r * std::cos(theta), r * std::sin(theta), 0.0),
        &out.clamped);
  }
  return out;
}

std::string_view to_string(PickStatus s) {
  switch (s) {
    case PickStatus::moved: return "moved";
    case PickStatus::grasped: return "grasped";
    case PickStatus::missed: return "missed";
    case PickStatus::ambiguous: return "ambiguous";
  }
  return "?";
}

StepOutcome execute_pick(const Scene& scene, const ActionVector& action) {
  StepOutcome out;
  out.gripper = clamp_to_table(scene.gripper_position + action.delta, nullptr);
  if (!action.grip_closed()) {
    out.status = PickStatus::moved;
    return out;
  }
  int within = 0;
  int id = -1;
  for (const auto& o : scene.objects) {
    if ((o.position - out.gripper).norm() <= kGraspRadius) {
      ++within;
      id = o.id;
    }
  }
  if (within == 1) {
    out.status = PickStatus::grasped;
    out.grasped_id = id;
  } else {
    out.status = within == 0 ? PickStatus::missed : PickStatus::ambiguous;
  }
  return out;
}

ActionVector expert_step(const Vec3& gripper, const Vec3& target) {
  ActionVector a;
  const Vec3 offset = target - gripper;
  const double d = offset.norm();
  // The relative slack absorbs rounding after whole steps along the line.
  if (d <= kMaxStepLength * (1.0 + 1e-9)) {
    a.delta = offset;
    a.grip = 1.0;
  } else {
    a.delta = offset * (kMaxStepLength / d);
    a.grip = 0.0;
  }
  return a;
}

Trajectory scripted_demonstration(const Scene& scene, int target_id) {
  const WorldObject* target = scene.find(target_id);
  if (!target) {
    throw ValidationError("demonstration target " + std::to_string(target_id) +
                          " not in scene " + std::to_string(scene.id));
  }
  if (!inside_table(target->position)) {
    throw ValidationError("demonstration target is unreachable");
  }
  Trajectory t;
  t.scene_id = scene.id;
  t.target_id = target_id;

  Vec3 at = scene.gripper_position;
  for (;;) {
    TrajectoryStep step;
    step.gripper = at;
    step.action = expert_step(at, target->position);
    t.steps.push_back(step);
    at = at + step.action.delta;
    if (step.action.grip_closed()) break;
  }
  t.final_gripper = at;
  return t;
}

StepOutcome replay(const Scene& scene, const Trajectory& trajectory) {
  Scene s = scene;
  StepOutcome last;
  last.gripper = s.gripper_position;
  for (const auto& step : trajectory.steps) {
    last = execute_pick(s, step.action);
    s.gripper_position = last.gripper;
    if (step.action.grip_closed()) break;
  }
  return last;
}

nlohmann::json vec_to_json(const Vec3& v) {
  return nlohmann::json::array({v.x(), v.y(), v.z()});
}

Vec3 vec_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw ValidationError("expected a 3-vector");
  }
  return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

nlohmann::json to_json(const Scene& scene) {
  nlohmann::json objs = nlohmann::json::array();
  for (const auto& o : scene.objects) {
    objs.push_back({{"id", o.id},
                    {"category", to_string(o.attrs.category)},
                    {"color", to_string(o.attrs.color)},
                    {"size", to_string(o.attrs.size)},
                    {"position", vec_to_json(o.position)}});
  }
  return {{"scene_id", scene.id},
          {"rng_seed", scene.rng_seed},
          {"gripper_position", vec_to_json(scene.gripper_position)},
          {"objects", objs}};
}

Scene scene_from_json(const nlohmann::json& j) {
  Scene s;
  s.id = j.at("scene_id").get<int>();
  s.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  s.gripper_position = vec_from_json(j.at("gripper_position"));
  for (const auto& o : j.at("objects")) {
    WorldObject w;
    w.id = o.at("id").get<int>();
    auto cat = parse_category(o.at("category").get<std::string>());
    auto col = parse_color(o.at("color").get<std::string>());
    auto siz = parse_size(o.at("size").get<std::string>());
    if (!cat || !col || !siz) throw ValidationError("unknown object attribute");
    w.attrs = {*cat, *col, *siz};
    w.position = vec_from_json(o.at("position"));
    if (!inside_table(w.position)) throw ValidationError("object off the table");
    if (s.find(w.id)) throw ValidationError("duplicate object id");
    s.objects.push_back(w);
  }
  return s;
}

std::vector<nlohmann::json> trajectory_to_jsonl(const Trajectory& t) {
  std::vector<nlohmann::json> lines;
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    const auto& st = t.steps[k];
    lines.push_back({{"scene_id", t.scene_id},
                     {"target_id", t.target_id},
                     {"step", k},
                     {"gripper", vec_to_json(st.gripper)},
                     {"delta", vec_to_json(st.action.delta)},
                     {"grip", st.action.grip}});
  }
  return lines;
}

Trajectory trajectory_from_jsonl(const std::vector<nlohmann::json>& lines) {
  if (lines.empty()) throw ValidationError("empty trajectory");
  Trajectory t;
  t.scene_id = lines.front().at("scene_id").get<int>();
  t.target_id = lines.front().at("target_id").get<int>();
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto& j = lines[k];
    if (j.at("step").get<std::size_t>() != k) {
      throw ValidationError("trajectory steps out of order");
    }
    TrajectoryStep st;
    st.gripper = vec_from_json(j.at("gripper"));
    st.action.delta = vec_from_json(j.at("delta"));
    st.action.grip = j.at("grip").get<double>();
    t.steps.push_back(st);
  }
  t.final_gripper = t.steps.back().gripper + t.steps.back().action.delta;
  return t;
}

}  // namespace vground
