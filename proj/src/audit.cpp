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

#include "vground/audit.hpp"

#include "vground/pipeline.hpp"

namespace vground {

namespace {

bool same_bits(const ActionVector& a, const ActionVector& b) {
  return a.delta.x() == b.delta.x() && a.delta.y() == b.delta.y() && a.delta.z() == b.delta.z() &&
         a.grip == b.grip;
}

}  // namespace

AuditReport bottleneck_audit(const EpisodeLog& trace, const Model& model, const Scene& observed,
                             std::span<const std::vector<std::string>> alternatives) {
  AuditReport r;
  for (const auto& f : trace.policy_fields) {
    if (language_derived(f.source)) {
      r.violations.push_back("policy_input." + f.name + " <- " + std::string(to_string(f.source)));
    }
  }
  Scene world = observed;
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    const auto& step = trace.steps[t];
    world.gripper_position = step.gripper;
    for (std::size_t k = 0; k < alternatives.size(); ++k) {
      ++r.replays;
      const ActionVector a = act(model, trace.goal, world, step.gripper, alternatives[k]);
      if (same_bits(a, step.action)) {
        ++r.identical;
      } else {
        r.violations.push_back("steps[" + std::to_string(t) + "].action under alternative " +
                               std::to_string(k));
      }
    }
  }
  r.passed = r.violations.empty();
  return r;
}

}  // namespace vground
