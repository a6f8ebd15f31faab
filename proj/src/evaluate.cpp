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

#include "vground/evaluate.hpp"

#include "vground/errors.hpp"
#include "vground/pipeline.hpp"
#include "vground/theory.hpp"

namespace vground {

MetricsReport summarize(const std::string& name, const std::vector<EpisodeLog>& test,
                        double threshold) {
  if (test.empty()) throw ValidationError("no test episodes to summarise");
  std::vector<std::pair<double, bool>> scores;
  std::vector<double> conf;
  std::vector<bool> outcome;
  std::vector<ScoredEpisode> s;
  double ha = 0.0, hu = 0.0;
  std::size_t na = 0, nu = 0, acted_ok = 0;
  for (const auto& e : test) {
    if (e.split != Split::test) {
      throw ValidationError("episode " + std::to_string(e.episode_id) + " is not a test episode");
    }
    scores.emplace_back(e.entropy, e.ambiguous());
    conf.push_back(normalized_confidence(e.entropy, e.entity_ids.size()));
    outcome.push_back(e.grounding_correct());
    s.push_back(scored(e));
    if (e.ambiguous()) {
      ha += e.entropy;
      ++na;
    } else {
      hu += e.entropy;
      ++nu;
      if (e.act_success) ++acted_ok;
    }
  }
  MetricsReport r;
  r.model = name;
  r.episodes = test.size();
  r.auroc = auroc(scores);
  r.aupr = aupr(scores);
  r.fpr_at_95 = fpr_at_95(scores);
  r.ece = ece(conf, outcome);
  r.cov_at_95 = cov_at_95(s);
  r.clar_at_ambig = clar_at_ambig(s);
  r.unambig_sr = unambig_sr(s);
  r.always_act_unambig_sr = static_cast<double>(acted_ok) / static_cast<double>(nu);
  r.threshold = threshold;
  r.mean_entropy_ambiguous = ha / static_cast<double>(na);
  r.mean_entropy_unambiguous = hu / static_cast<double>(nu);
  return r;
}

Evaluation evaluate(const Model& model, const std::string& name, const CabDataset& dataset,
                    const EvalOptions& options) {
  Evaluation ev;
  ev.val = run_split(model, dataset, Split::val, {}, options.workers);
  ev.policy = calibrate_threshold(ev.val, options.target);
  ev.test = run_split(model, dataset, Split::test, {}, options.workers);
  ev.curve = risk_coverage_curve(ev.test);
  apply_selective_policy(ev.test, ev.policy);
  ev.report = summarize(name, ev.test, ev.policy.threshold);
  if (model.entity_centric()) {
    for (int n : options.recall_sizes) {
      const auto eps = retrieval_episodes(model, dataset, Split::test, n, options.seed);
      ev.report.recall_at_1.emplace_back(n, recall_at_k(eps, 1));
    }
  }
  if (options.language_grid) {
    ev.report.language_ignorance = language_grid(model, dataset, Split::test).goal.lambda_index;
  }
  return ev;
}

}  // namespace vground
