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

// Fast action policy: a two-layer tanh perceptron over the verified goal,
// an observation summary and the gripper state. The stochastic policy
// degenerates to its mean; the regression output is the action.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vground/types.hpp"
#include "vground/world_sim.hpp"

namespace vground {

inline constexpr int kObservationDim = 4;
inline constexpr int kActionDim = 4;
inline constexpr int kPolicyHidden = 64;

enum class InputSource { verified_goal, observation, robot_state, instruction, subgoal };

std::string_view to_string(InputSource s);
std::optional<InputSource> parse_input_source(std::string_view s);
bool language_derived(InputSource s);

// What besides (obs, q) the policy conditions on.
enum class PolicyConditioning {
  verified_goal,              // the bottlenecked architecture
  verified_goal_and_instruction,  // raw instruction features leak into the policy
  subgoal,                    // template features, no grounding
  instruction,                // raw instruction features, no grounding
};

std::string_view to_string(PolicyConditioning c);
std::optional<PolicyConditioning> parse_policy_conditioning(std::string_view s);

struct PolicyField {
  std::string name;
  InputSource source;
  int offset = 0;
  int dim = 0;
};

struct PolicyInput {
  Eigen::VectorXd goal;  // empty when the policy is not goal-conditioned
  Eigen::VectorXd observation;
  Vec3 robot_state = Vec3::Zero();
  std::optional<Eigen::VectorXd> language;
  InputSource language_source = InputSource::instruction;

  Eigen::VectorXd flatten() const;
  std::vector<PolicyField> fields() const;
};

// Mean object position and object count / 6.
Eigen::VectorXd observation_features(const Scene& scene);

struct PolicyParams {
  PolicyConditioning conditioning = PolicyConditioning::verified_goal;
  Eigen::MatrixXd w1;  // hidden x input
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // kActionDim x hidden
  Eigen::VectorXd b2;

  int input_dim() const { return static_cast<int>(w1.cols()); }
  static PolicyParams random(std::uint64_t seed, PolicyConditioning conditioning,
                             int input_dim, int hidden = kPolicyHidden);
  static PolicyParams zeros(PolicyConditioning conditioning, int input_dim,
                            int hidden = kPolicyHidden);
};

struct PolicyCache {
  Eigen::VectorXd input;
  Eigen::VectorXd hidden;
};

struct PolicyOutput {
  Eigen::VectorXd raw;  // kActionDim regression output
  ActionVector action;  // delta clamped to kMaxStepLength, grip to [0, 1]
  PolicyCache cache;
};

struct PolicyGradients {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
  Eigen::VectorXd input;
};

ActionVector to_action(const Eigen::VectorXd& raw);

// Throws ValidationError on non-finite input or a layout that does not
// match the parameters' conditioning.
PolicyOutput policy_forward(const PolicyInput& input, const PolicyParams& params);

PolicyGradients policy_backward(const Eigen::VectorXd& grad_raw, const PolicyCache& cache,
                                const PolicyParams& params);

}  // namespace vground
