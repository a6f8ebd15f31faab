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

#include "vground/model.hpp"

#include <algorithm>
#include <cmath>

#include "vground/errors.hpp"

namespace vground {

std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::full: return "full";
    case Ablation::no_gac: return "no_gac";
    case Ablation::no_planner: return "no_planner";
    case Ablation::no_gsm: return "no_gsm";
    case Ablation::lang_to_fast: return "lang_to_fast";
  }
  return "?";
}

std::optional<Ablation> parse_ablation(std::string_view s) {
  for (auto a : {Ablation::full, Ablation::no_gac, Ablation::no_planner, Ablation::no_gsm,
                 Ablation::lang_to_fast}) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

int patch_cell(const Vec3& p) {
  auto bin = [](double v) {
    return std::clamp(static_cast<int>(std::floor(v * kPatchGrid)), 0, kPatchGrid - 1);
  };
  return bin(p.y()) * kPatchGrid + bin(p.x());
}

Eigen::Vector3d metric_position(const Vec3& p) {
  return kPositionScale * (p - Vec3(0.5, 0.5, 0.0));
}

int StateRows::index_of(int id) const {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return static_cast<int>(i);
  }
  return -1;
}

int policy_input_dim(PolicyConditioning c) {
  const int base = kObservationDim + 3;
  switch (c) {
    case PolicyConditioning::verified_goal: return kAttentionWidth + base;
    case PolicyConditioning::verified_goal_and_instruction:
      return kAttentionWidth + base + instruction_feature_dim();
    case PolicyConditioning::subgoal: return base + kTemplateFeatureDim;
    case PolicyConditioning::instruction: return base + instruction_feature_dim();
  }
  return base;
}

PolicyConditioning Model::conditioning() const {
  return ablation == Ablation::lang_to_fast ? PolicyConditioning::verified_goal_and_instruction
                                            : PolicyConditioning::verified_goal;
}

int Model::query_dim() const {
  return ablation == Ablation::no_planner ? instruction_feature_dim() : kTemplateFeatureDim;
}

Model Model::create(Ablation ablation, std::uint64_t seed, double attention_scale,
                    double encoder_scale) {
  Model m;
  m.ablation = ablation;
  m.encoder = EncoderParams::random(seed, encoder_scale);
  m.saca = SacaParams::random(seed, m.query_dim(), kRowDim, kAttentionWidth, attention_scale);
  const auto c = m.conditioning();
  m.policy = PolicyParams::random(seed, c, policy_input_dim(c));
  m.probe_subgoal = PolicyParams::random(seed + 1, PolicyConditioning::subgoal,
                                         policy_input_dim(PolicyConditioning::subgoal));
  m.probe_instruction = PolicyParams::random(seed + 2, PolicyConditioning::instruction,
                                             policy_input_dim(PolicyConditioning::instruction));
  return m;
}

void Model::validate() const {
  if (encoder.weight.rows() != kEntityDim || encoder.weight.cols() != kEncoderInputDim) {
    throw ValidationError("encoder weight has the wrong shape");
  }
  saca.validate();
  if (saca.query.cols() != query_dim() || saca.key.cols() != kRowDim ||
      saca.width() != kAttentionWidth) {
    throw ValidationError("attention parameters have the wrong shape");
  }
  auto check = [](const PolicyParams& p, PolicyConditioning c, const char* name) {
    if (p.conditioning != c || p.input_dim() != policy_input_dim(c) ||
        p.b1.size() != p.w1.rows() || p.w2.cols() != p.w1.rows() ||
        p.w2.rows() != kActionDim || p.b2.size() != kActionDim) {
      throw ValidationError(std::string(name) + " parameters have the wrong shape");
    }
  };
  check(policy, conditioning(), "policy");
  check(probe_subgoal, PolicyConditioning::subgoal, "subgoal probe");
  check(probe_instruction, PolicyConditioning::instruction, "instruction probe");
}

Eigen::VectorXd query_features(Ablation ablation, std::span<const std::string> tokens) {
  const auto subgoal = extract_template(tokens);
  if (ablation == Ablation::no_planner) return instruction_features(tokens);
  return template_features(subgoal);
}

StateRows observe_state(const Model& model, const Scene& scene,
                        const std::optional<Perturbation>& p) {
  const Scene* view = &scene;
  PerturbedScene moved;
  if (p && p->geometric()) {
    moved = apply_perturbation(scene, *p);
    view = &moved.scene;
  }
  const Perturbation* photometric = (p && !p->geometric()) ? &*p : nullptr;

  std::vector<Eigen::VectorXd> inputs;
  StateRows s;
  if (model.entity_centric()) {
    for (const auto& obj : view->objects) {
      inputs.push_back(encoder_input(obj, noise_channel(photometric, obj.id)));
      s.ids.push_back(obj.id);
      s.positions.push_back(obj.position);
    }
  } else {
    const int cells = kPatchGrid * kPatchGrid;
    for (int c = 0; c < cells; ++c) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(kEncoderInputDim);
      const Vec3 center((c % kPatchGrid + 0.5) / kPatchGrid, (c / kPatchGrid + 0.5) / kPatchGrid,
                        0.0);
      x.segment<3>(kAttributeDim) = center;
      x(kEncoderInputDim - 1) = 1.0;
      inputs.push_back(std::move(x));
      s.ids.push_back(patch_id(c));
      s.positions.push_back(center);
    }
    // Everything falling in a patch is summed into one unstructured row.
    for (const auto& obj : view->objects) {
      auto& x = inputs[static_cast<std::size_t>(patch_cell(obj.position))];
      x.head<kAttributeDim>() += one_hot(obj.attrs);
      x.segment<kNoiseChannelDim>(kAttributeDim + 3) += noise_channel(photometric, obj.id);
    }
  }
  const int n = static_cast<int>(inputs.size());
  s.rows.resize(n, kRowDim);
  s.caches.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    s.rows.row(i).head<kEntityDim>() =
        encode_appearance(inputs[static_cast<std::size_t>(i)], model.encoder,
                          &s.caches[static_cast<std::size_t>(i)])
            .transpose();
    s.rows.row(i).tail<3>() = metric_position(s.positions[static_cast<std::size_t>(i)]).transpose();
  }
  return s;
}

int row_id_for(const Model& model, const Scene& scene, int object_id) {
  const auto* obj = scene.find(object_id);
  if (!obj) throw ValidationError("object " + std::to_string(object_id) + " not in scene");
  return model.entity_centric() ? object_id : patch_id(patch_cell(obj->position));
}

PolicyInput policy_input(const Model& model, const Eigen::VectorXd& goal, const Scene& observed,
                         const Vec3& gripper, std::span<const std::string> tokens) {
  PolicyInput in;
  in.goal = goal;
  in.observation = observation_features(observed);
  in.robot_state = metric_position(gripper);
  if (model.conditioning() == PolicyConditioning::verified_goal_and_instruction) {
    in.language = instruction_features(tokens);
    in.language_source = InputSource::instruction;
  }
  return in;
}

PolicyInput probe_input(PolicyConditioning c, const Scene& observed, const Vec3& gripper,
                        std::span<const std::string> tokens) {
  PolicyInput in;
  in.observation = observation_features(observed);
  in.robot_state = metric_position(gripper);
  switch (c) {
    case PolicyConditioning::subgoal:
      in.language = template_features(extract_template(tokens));
      in.language_source = InputSource::subgoal;
      break;
    case PolicyConditioning::instruction:
      in.language = instruction_features(tokens);
      in.language_source = InputSource::instruction;
      break;
    default:
      throw ValidationError("probe conditioning must be subgoal or instruction");
  }
  return in;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size()) {
    throw ValidationError("parameter block size does not match its shape");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

namespace {

nlohmann::json policy_to_json(const PolicyParams& p) {
  return {{"conditioning", to_string(p.conditioning)},
          {"w1", matrix_to_json(p.w1)},
          {"b1", matrix_to_json(p.b1)},
          {"w2", matrix_to_json(p.w2)},
          {"b2", matrix_to_json(p.b2)}};
}

PolicyParams policy_from_json(const nlohmann::json& j) {
  PolicyParams p;
  auto c = parse_policy_conditioning(j.at("conditioning").get<std::string>());
  if (!c) throw ValidationError("unknown policy conditioning");
  p.conditioning = *c;
  p.w1 = matrix_from_json(j.at("w1"));
  p.b1 = matrix_from_json(j.at("b1"));
  p.w2 = matrix_from_json(j.at("w2"));
  p.b2 = matrix_from_json(j.at("b2"));
  return p;
}

}  // namespace

nlohmann::json to_json(const Model& m) {
  return {{"ablation", to_string(m.ablation)},
          {"encoder", matrix_to_json(m.encoder.weight)},
          {"saca_query", matrix_to_json(m.saca.query)},
          {"saca_key", matrix_to_json(m.saca.key)},
          {"saca_value", matrix_to_json(m.saca.value)},
          {"policy", policy_to_json(m.policy)},
          {"probe_subgoal", policy_to_json(m.probe_subgoal)},
          {"probe_instruction", policy_to_json(m.probe_instruction)}};
}

Model model_from_json(const nlohmann::json& j) {
  Model m;
  try {
    auto a = parse_ablation(j.at("ablation").get<std::string>());
    if (!a) throw ValidationError("unknown ablation");
    m.ablation = *a;
    m.encoder.weight = matrix_from_json(j.at("encoder"));
    m.saca.query = matrix_from_json(j.at("saca_query"));
    m.saca.key = matrix_from_json(j.at("saca_key"));
    m.saca.value = matrix_from_json(j.at("saca_value"));
    m.policy = policy_from_json(j.at("policy"));
    m.probe_subgoal = policy_from_json(j.at("probe_subgoal"));
    m.probe_instruction = policy_from_json(j.at("probe_instruction"));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed model parameters: ") + e.what());
  }
  m.validate();
  return m;
}

}  // namespace vground
