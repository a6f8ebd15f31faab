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

#include "vground/policy.hpp"


#include <algorithm>
#include <cmath>

#include "vground/errors.hpp"
#include "vground/rng.hpp"

namespace vground {

std::string_view to_string(InputSource s) {
  switch (s) {
    case InputSource::verified_goal: return "verified_goal";
    case InputSource::observation: return "observation";
    case InputSource::robot_state: return "robot_state";
    case InputSource::instruction: return "instruction";
    case InputSource::subgoal: return "subgoal";
  }
  return "?";
}

std::optional<InputSource> parse_input_source(std::string_view s) {
  for (auto v : {InputSource::verified_goal, InputSource::observation,
                 InputSource::robot_state, InputSource::instruction, InputSource::subgoal}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

bool language_derived(InputSource s) {
  return s == InputSource::instruction || s == InputSource::subgoal;
}

std::string_view to_string(PolicyConditioning c) {
  switch (c) {
    case PolicyConditioning::verified_goal: return "verified_goal";
    case PolicyConditioning::verified_goal_and_instruction: return "verified_goal_and_instruction";
    case PolicyConditioning::subgoal: return "subgoal";
    case PolicyConditioning::instruction: return "instruction";
  }
  return "?";
}

std::optional<PolicyConditioning> parse_policy_conditioning(std::string_view s) {
  for (auto v : {PolicyConditioning::verified_goal,
                 PolicyConditioning::verified_goal_and_instruction,
                 PolicyConditioning::subgoal, PolicyConditioning::instruction}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

Eigen::VectorXd PolicyInput::flatten() const {
  const int lang = language ? static_cast<int>(language->size()) : 0;
  Eigen::VectorXd x(goal.size() + observation.size() + 3 + lang);
  int o = 0;
  x.segment(o, goal.size()) = goal;
  o += static_cast<int>(goal.size());
  x.segment(o, observation.size()) = observation;
  o += static_cast<int>(observation.size());
  x.segment<3>(o) = robot_state;
  o += 3;
  if (language) x.segment(o, lang) = *language;
  return x;
}

std::vector<PolicyField> PolicyInput::fields() const {
  std::vector<PolicyField> f;
  int o = 0;
  if (goal.size() > 0) {
    f.push_back({"goal", InputSource::verified_goal, o, static_cast<int>(goal.size())});
    o += static_cast<int>(goal.size());
  }
  f.push_back({"observation", InputSource::observation, o, static_cast<int>(observation.size())});
  o += static_cast<int>(observation.size());
  f.push_back({"robot_state", InputSource::robot_state, o, 3});
  o += 3;
  if (language) {
    f.push_back({"language", language_source, o, static_cast<int>(language->size())});
  }
  return f;
}

Eigen::VectorXd observation_features(const Scene& scene) {
  Eigen::VectorXd o = Eigen::VectorXd::Zero(kObservationDim);
  if (scene.objects.empty()) return o;
  Vec3 mean = Vec3::Zero();
  for (const auto& obj : scene.objects) mean += obj.position;
  mean /= static_cast<double>(scene.objects.size());
  o.head<3>() = mean;
  o(3) = static_cast<double>(scene.objects.size()) / 6.0;
  return o;
}

PolicyParams PolicyParams::random(std::uint64_t seed, PolicyConditioning conditioning,
                                  int input_dim, int hidden) {
  Rng rng = Rng::derive(seed, {0x90C1});
  PolicyParams p = zeros(conditioning, input_dim, hidden);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (int i = 0; i < p.w1.rows(); ++i) {
    for (int j = 0; j < p.w1.cols(); ++j) p.w1(i, j) = s1 * rng.normal();
  }
  for (int i = 0; i < p.w2.rows(); ++i) {
    for (int j = 0; j < p.w2.cols(); ++j) p.w2(i, j) = 0.1 * s2 * rng.normal();
  }
  return p;
}

PolicyParams PolicyParams::zeros(PolicyConditioning conditioning, int input_dim, int hidden) {
  PolicyParams p;
  p.conditioning = conditioning;
  p.w1 = Eigen::MatrixXd::Zero(hidden, input_dim);
  p.b1 = Eigen::VectorXd::Zero(hidden);
  p.w2 = Eigen::MatrixXd::Zero(kActionDim, hidden);
  p.b2 = Eigen::VectorXd::Zero(kActionDim);
  return p;
}

ActionVector to_action(const Eigen::VectorXd& raw) {
  ActionVector a;
  a.delta = raw.head<3>();
  const double n = a.delta.norm();
  if (n > kMaxStepLength) a.delta *= kMaxStepLength / n;
  a.grip = std::clamp(raw(3), 0.0, 1.0);
  return a;
}

namespace {

void check_layout(const PolicyInput& in, const PolicyParams& p) {
  const bool has_goal = in.goal.size() > 0;
  const bool has_lang = in.language.has_value();
  bool ok = false;
  switch (p.conditioning) {
    case PolicyConditioning::verified_goal: ok = has_goal && !has_lang; break;
    case PolicyConditioning::verified_goal_and_instruction: ok = has_goal && has_lang; break;
    case PolicyConditioning::subgoal:
    case PolicyConditioning::instruction: ok = !has_goal && has_lang; break;
  }
  if (!ok) {
    throw ValidationError("policy input layout does not match conditioning '" +
                          std::string(to_string(p.conditioning)) + "'");
  }
}

}  // namespace

PolicyOutput policy_forward(const PolicyInput& input, const PolicyParams& params) {
  check_layout(input, params);
  PolicyOutput out;
  out.cache.input = input.flatten();
  if (out.cache.input.size() != params.input_dim()) {
    throw ValidationError("policy input has dimension " +
                          std::to_string(out.cache.input.size()) + ", expected " +
                          std::to_string(params.input_dim()));
  }
  if (!out.cache.input.allFinite()) throw ValidationError("policy input is not finite");
  out.cache.hidden = (params.w1 * out.cache.input + params.b1).array().tanh().matrix();
  out.raw = params.w2 * out.cache.hidden + params.b2;
  out.action = to_action(out.raw);
  return out;
}

PolicyGradients policy_backward(const Eigen::VectorXd& grad_raw, const PolicyCache& cache,
                                const PolicyParams& params) {
  PolicyGradients g;
  g.w2 = grad_raw * cache.hidden.transpose();
  g.b2 = grad_raw;
  const Eigen::VectorXd dh = params.w2.transpose() * grad_raw;
  const Eigen::VectorXd dpre =
      dh.cwiseProduct((1.0 - cache.hidden.array().square()).matrix());
  g.w1 = dpre * cache.input.transpose();
  g.b1 = dpre;
  g.input = params.w1.transpose() * dpre;
  return g;
}

}  // namespace vground
