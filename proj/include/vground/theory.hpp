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

// Numerical checks of the grounding theory on trained models: the
// contrastive lower bound on I(S;E), the verification bottleneck, the
// language-influence grid and the robustness sweep. Also builds the
// candidate sets for retrieval.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vground/cab_bench.hpp"
#include "vground/metrics.hpp"
#include "vground/model.hpp"

namespace vground {

// One (sub-goal, entity) draw from the joint. query and key are the
// contrastive embeddings W_q s and W_k e.
struct BoundSample {
  int s_symbol = 0;
  int e_class = 0;
  Eigen::VectorXd query;
  Eigen::VectorXd key;
};

// marginal: negatives are other samples drawn uniformly.
// distinct_class: the N candidates of a batch carry N distinct classes.
enum class NegativeSampling { marginal, distinct_class };

std::string_view to_string(NegativeSampling s);

struct BoundReport {
  int batch_n = 0;
  NegativeSampling sampling = NegativeSampling::marginal;
  std::size_t samples = 0;
  int batches = 0;
  double mutual_information = 0.0;  // plug-in I(S;E), nats
  double miller_madow = 0.0;
  double mean_loss = 0.0;
  double loss_se = 0.0;
  // Two standard errors of the mean loss.
  double estimator_error = 0.0;
  double lower_bound = 0.0;  // ln N - E[L]
  // I + estimator_error - lower_bound; negative means violated.
  double slack = 0.0;
  bool satisfied = false;
};

// Throws ValidationError when fewer than batch_n samples (or classes, for
// distinct_class) are available.
BoundReport infonce_bound(std::span<const BoundSample> samples, int batch_n, double tau,
                          NegativeSampling sampling, int batches, std::uint64_t seed);

// (template, target class) pairs of every instruction in the given splits,
// embedded by the model. The no_planner query symbol is the instruction.
std::vector<BoundSample> bound_samples(const Model& model, const CabDataset& dataset,
                                       std::span<const Split> splits);

struct BottleneckReport {
  int episodes = 0;
  int replays = 0;
  int identical = 0;
  int passed_episodes = 0;
  std::vector<std::string> violations;
  bool passed = false;
};

// Audits the first `episodes` instructions of the split, each replayed with
// `alternatives` instructions drawn from the rest of the dataset.
BottleneckReport verify_bottleneck(const Model& model, const CabDataset& dataset, Split split,
                                   int episodes, int alternatives, std::uint64_t seed);

struct LanguageGridOptions {
  std::vector<Vec3> starts = {Vec3(0.5, 0.5, 0.25), Vec3(0.3, 0.3, 0.2), Vec3(0.7, 0.3, 0.2),
                              Vec3(0.5, 0.7, 0.15)};
  int instructions_per_context = 3;
  int bins = 5;
};

// Contexts are (scene, gripper start). Each context gets the first
// instructions_per_context unambiguous instructions with distinct targets.
struct LanguageGridReport {
  int contexts = 0;
  int instruction_space = 0;
  int bins = 0;
  LanguageInfluenceEstimate goal;         // fast policy on g
  LanguageInfluenceEstimate subgoal;      // probe on the template
  LanguageInfluenceEstimate instruction;  // probe on the raw instruction
  DecompositionCheck decomposition;       // fast policy, exact g symbols
  bool goal_lowest = false;
};

LanguageGridReport language_grid(const Model& model, const CabDataset& dataset, Split split,
                                 const LanguageGridOptions& options = {});

struct RobustnessOptions {
  std::vector<double> magnitudes = {0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1};
  std::vector<PerturbationKind> kinds = {PerturbationKind::viewpoint, PerturbationKind::layout,
                                         PerturbationKind::lighting,
                                         PerturbationKind::feature_noise};
  int episodes = 50;
  std::uint64_t seed = 0;
};

struct RobustnessPoint {
  PerturbationKind kind = PerturbationKind::viewpoint;
  double magnitude = 0.0;
  double mean_displacement = 0.0;
  double max_displacement = 0.0;
};

// Least-squares line through (magnitude, mean displacement).
struct RobustnessFit {
  PerturbationKind kind = PerturbationKind::viewpoint;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  // Every point satisfies d(m) / m <= 2 d(m_min) / m_min.
  bool at_most_linear = false;
};

struct RobustnessReport {
  std::vector<RobustnessPoint> points;
  std::vector<RobustnessFit> fits;
  bool zero_bit_exact = false;
  bool passed = false;
};

// Displacement is ||a(perturbed) - a(clean)|| of the first action over the
// unambiguous instructions of the split.
RobustnessReport robustness_sweep(const Model& model, const CabDataset& dataset, Split split,
                                  const RobustnessOptions& options = {});

// Retrieval over the referent of every unambiguous instruction of the
// split. The scene's own objects are topped up to N candidates with objects
// from any other scene of the dataset that do not satisfy the template.
// Requires an entity-centric model.
std::vector<RetrievalEpisode> retrieval_episodes(const Model& model, const CabDataset& dataset,
                                                 Split split, int n, std::uint64_t seed);

nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const BottleneckReport& r);
nlohmann::json to_json(const LanguageGridReport& r);
nlohmann::json to_json(const RobustnessReport& r);

}  // namespace vground
