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

// Verification-bottleneck audit of an episode trace.

#include <span>
#include <string>
#include <vector>

#include "vground/episode.hpp"
#include "vground/model.hpp"

namespace vground {

struct AuditReport {
  bool passed = true;
  // Field paths where instruction-derived data entered the policy input, or
  // replays whose action moved.
  std::vector<std::string> violations;
  int replays = 0;
  int identical = 0;
};

// Inspects the logged policy-input layout, then replays every logged step
// with each alternative instruction at the logged (g, obs, q) and compares
// the actions bit for bit. `observed` is the scene the episode saw.
AuditReport bottleneck_audit(const EpisodeLog& trace, const Model& model, const Scene& observed,
                             std::span<const std::vector<std::string>> alternatives);

}  // namespace vground
