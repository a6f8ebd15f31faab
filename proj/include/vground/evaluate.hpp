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

// Calibrate on val, act or clarify on test, and summarise.

#include <cstdint>
#include <string>
#include <vector>

#include "vground/cab_bench.hpp"
#include "vground/metrics.hpp"
#include "vground/model.hpp"
#include "vground/selective.hpp"

namespace vground {

struct EvalOptions {
  int workers = 1;
  CalibrationTarget target = CalibrationTarget::max_total;
  std::vector<int> recall_sizes = {8, 16, 32};
  std::uint64_t seed = 0;
  bool language_grid = true;
};

struct Evaluation {
  SelectivePolicy policy;
  std::vector<EpisodeLog> val;
  std::vector<EpisodeLog> test;  // selective policy applied
  std::vector<RiskCoveragePoint> curve;
  MetricsReport report;
};

Evaluation evaluate(const Model& model, const std::string& name, const CabDataset& dataset,
                    const EvalOptions& options = {});

// Table metrics over test episodes that already carry their decisions.
// Throws ValidationError if any episode is not from the test split.
MetricsReport summarize(const std::string& name, const std::vector<EpisodeLog>& test,
                        double threshold);

}  // namespace vground
