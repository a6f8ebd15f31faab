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

// Evaluation metrics.
//
// Ambiguity detection treats ambiguous episodes as positives scored by
// attention entropy.
//   AUROC   exact pair counting, ties count 1/2.
//   AUPR    average precision over distinct score thresholds, descending;
//           each tie group contributes (positives in group / P) * precision
//           at that threshold.
//   FPR@95  smallest false-positive rate over thresholds reaching TPR >= 0.95.
//   ECE     10 equal-width bins over [0,1] (last bin closed), empty bins skipped;
//           confidence = 1 - H / ln(n), outcome = grounding correct.
//   Cov@95  largest coverage whose selective accuracy is >= 0.95.
// Recall@k ranks the true entity by logit; it loses every tie.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vground/episode.hpp"

namespace vground {

struct ScoredEpisode {
  double entropy = 0.0;
  bool is_ambiguous = false;
  bool clarified = false;
  bool succeeded = false;
  // Outcome had the episode acted.
  bool act_success = false;
  std::optional<int> retrieval_rank;
};

ScoredEpisode scored(const EpisodeLog& e);

// (score, is_positive). Throws ValidationError unless both classes occur.
double auroc(std::span<const std::pair<double, bool>> scores);
double aupr(std::span<const std::pair<double, bool>> scores);
double fpr_at_95(std::span<const std::pair<double, bool>> scores);

// Throws ValidationError on size mismatch, empty input or confidences
// outside [0,1].
double ece(std::span<const double> confidences, const std::vector<bool>& outcomes,
           int bins = 10);

double cov_at_95(std::span<const ScoredEpisode> episodes);
double clar_at_ambig(std::span<const ScoredEpisode> episodes);
double unambig_sr(std::span<const ScoredEpisode> episodes);

// 1 - H / ln(n); 1 when n == 1.
double normalized_confidence(double entropy, std::size_t n);

struct RetrievalEpisode {
  std::vector<double> logits;
  std::vector<int> candidate_ids;
  int true_id = 0;
};

// 1 + number of other candidates whose logit is >= the true entity's.
// Throws ValidationError when the true entity is absent.
int retrieval_rank(const RetrievalEpisode& e);
double recall_at_k(std::span<const RetrievalEpisode> episodes, int k);

// Plug-in estimators over discrete symbols, in nats.
double plugin_entropy(std::span<const int> x);
double plugin_mutual_information(std::span<const std::pair<int, int>> xy);
// Sum over c of p(c) I(X; Y | C = c). Triples are (x, y, c).
double plugin_conditional_mi(std::span<const std::tuple<int, int, int>> xyc);
// Miller-Madow correction for the plug-in MI: (Kxy - Kx - Ky + 1) / (2n).
double miller_madow_mi_bias(std::span<const std::pair<int, int>> xy);

struct LanguageTrace {
  int context = 0;      // (observation, robot state) cell
  int instruction = 0;  // index into the instruction space
  // Quantized action symbol; unset means the action was not quantized.
  std::optional<int> action_symbol;
  // Exact verified-goal symbol, for the decomposition check.
  std::optional<int> goal_symbol;
};

struct LanguageInfluenceEstimate {
  double mi_nats = 0.0;
  double lambda_index = 1.0;
  int instruction_space_size = 0;
};

// Plug-in I(L; a | context) and the index 1 - I / ln|L|, clamped to [0,1].
// Throws ValidationError on unquantized actions or |L| < 2.
LanguageInfluenceEstimate language_influence(std::span<const LanguageTrace> traces,
                                             int instruction_space_size);

struct DecompositionCheck {
  double direct = 0.0;        // I(L; a | C)
  double through_goal = 0.0;  // I(L; g | C) - I(L; g | a, C)
  double gap = 0.0;
};

// Throws ValidationError when goal or action symbols are missing.
DecompositionCheck language_decomposition(std::span<const LanguageTrace> traces);

// 5 bins per action dimension; delta components over [-max_step, max_step],
// grip over [0, 1]. Returns a single symbol.
int quantize_action(const ActionVector& a, int bins = 5);

struct MetricsReport {
  std::string model;
  double auroc = 0.0;
  double aupr = 0.0;
  double ece = 0.0;
  double cov_at_95 = 0.0;
  double fpr_at_95 = 0.0;
  double clar_at_ambig = 0.0;
  double unambig_sr = 0.0;
  double always_act_unambig_sr = 0.0;
  double threshold = 0.0;
  double mean_entropy_ambiguous = 0.0;
  double mean_entropy_unambiguous = 0.0;
  std::vector<std::pair<int, double>> recall_at_1;  // (N, recall)
  std::optional<double> language_ignorance;
  std::size_t episodes = 0;
};

nlohmann::json to_json(const MetricsReport& r);
MetricsReport metrics_report_from_json(const nlohmann::json& j);

}  // namespace vground
