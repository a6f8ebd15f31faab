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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "vground/errors.hpp"
#include "vground/rng.hpp"
#include "vground/selective.hpp"

namespace vground {
namespace {

EpisodeLog episode(int id, double entropy, bool ambiguous, bool act_success,
                   Split split = Split::val) {
  EpisodeLog e;
  e.episode_id = id;
  e.instruction_id = id;
  e.split = split;
  e.entropy = entropy;
  e.label = ambiguous ? AmbiguityLabel::ambiguous : AmbiguityLabel::unambiguous;
  e.act_success = act_success;
  return e;
}

TEST(Decide, Boundaries) {
  SelectivePolicy p;
  p.threshold = 0.4;
  EXPECT_EQ(decide(0.0, p), Decision::act);
  p.threshold = 0.0;
  EXPECT_EQ(decide(1e-12, p), Decision::clarify);
  VerifiedGoal g;
  g.alpha = Eigen::Vector2d(0.5, 0.5);
  g.entropy = attention_entropy(g.alpha);
  p.threshold = std::log(2.0);
  EXPECT_EQ(decide(g, p), Decision::act);
}

TEST(Calibrate, SeparableReturnsGapMidpoint) {
  std::vector<EpisodeLog> logs;
  for (double h : {0.1, 0.2, 0.3}) logs.push_back(episode(static_cast<int>(logs.size()), h, false, true));
  for (double h : {0.8, 0.9}) logs.push_back(episode(static_cast<int>(logs.size()), h, true, false));
  const auto p = calibrate_threshold(logs);
  EXPECT_DOUBLE_EQ(p.threshold, 0.55);
  EXPECT_FALSE(p.degenerate);
}

TEST(Calibrate, FailingTopUnambiguousStillActs) {
  // Clarifying the failed unambiguous episode gains nothing, so coverage wins.
  std::vector<EpisodeLog> logs = {episode(0, 0.1, false, true), episode(1, 0.5, false, false),
                                  episode(2, 0.9, true, false)};
  EXPECT_DOUBLE_EQ(calibrate_threshold(logs).threshold, 0.7);
}

TEST(Calibrate, EqualEntropiesAreDegenerate) {
  std::vector<EpisodeLog> logs;
  for (int i = 0; i < 6; ++i) logs.push_back(episode(i, 0.5, i % 2 == 0, i % 2 == 1));
  EXPECT_TRUE(calibrate_threshold(logs).degenerate);
}

TEST(Calibrate, RejectsOtherSplitsAndEmpty) {
  std::vector<EpisodeLog> logs = {episode(0, 0.1, false, true, Split::test)};
  EXPECT_THROW(calibrate_threshold(logs), ValidationError);
  EXPECT_THROW(calibrate_threshold({}), ValidationError);
}

// Exhaustive oracle: try acting on the k lowest distinct entropy levels.
TEST(Calibrate, MatchesExhaustiveSweep) {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<EpisodeLog> logs;
    for (int i = 0; i < 50; ++i) {
      const bool amb = rng.bernoulli(0.5);
      const double h = 0.0625 * rng.uniform_int(0, 24) + (amb ? 0.25 : 0.0);
      logs.push_back(episode(i, h, amb, !amb && rng.bernoulli(0.8)));
    }
    std::set<double> levels;
    for (const auto& e : logs) levels.insert(e.entropy);
    const std::vector<double> v(levels.begin(), levels.end());
    int best = -1;
    std::size_t best_k = 0;
    for (std::size_t k = v.front() > 0.0 ? 0 : 1; k <= v.size(); ++k) {
      int ok = 0;
      for (const auto& e : logs) {
        const bool acts = k > 0 && e.entropy <= v[k - 1];
        ok += acts ? e.act_success : e.ambiguous();
      }
      if (ok >= best) {
        best = ok;
        best_k = k;
      }
    }
    const double want = best_k == 0         ? v.front() / 2.0
                        : best_k == v.size() ? v.back()
                                             : (v[best_k - 1] + v[best_k]) / 2.0;
    ASSERT_DOUBLE_EQ(calibrate_threshold(logs).threshold, want) << "trial " << trial;
  }
}

TEST(Calibrate, CoverageTargetKeepsAccuracy) {
  std::vector<EpisodeLog> logs;
  for (int i = 0; i < 19; ++i) logs.push_back(episode(i, 0.01 * i, false, true));
  logs.push_back(episode(19, 0.5, false, false));
  for (int i = 20; i < 30; ++i) logs.push_back(episode(i, 0.6 + 0.01 * i, true, false));
  const auto p = calibrate_threshold(logs, CalibrationTarget::cov_at_95);
  std::vector<EpisodeLog> applied = logs;
  apply_selective_policy(applied, p);
  int acted = 0, ok = 0;
  for (const auto& e : applied) {
    if (!e.clarified()) {
      ++acted;
      ok += e.act_success;
    }
  }
  EXPECT_EQ(acted, 20);
  EXPECT_GE(ok, 0.95 * acted);
}

TEST(ApplyPolicy, GroundingFailureAlwaysClarifies) {
  std::vector<EpisodeLog> logs = {episode(0, 0.0, true, false)};
  logs[0].grounding_failed = true;
  SelectivePolicy p;
  p.threshold = 10.0;
  apply_selective_policy(logs, p);
  EXPECT_TRUE(logs[0].clarified());
  EXPECT_TRUE(logs[0].succeeded);
}

TEST(RiskCoverage, FullCoverageIsOverallFailureRate) {
  std::vector<EpisodeLog> logs = {episode(0, 0.2, false, true), episode(1, 0.4, false, false),
                                  episode(2, 0.4, true, false), episode(3, 0.9, false, true)};
  const auto c = risk_coverage_curve(logs);
  EXPECT_DOUBLE_EQ(c.back().coverage, 1.0);
  EXPECT_DOUBLE_EQ(c.back().risk, 0.5);
  EXPECT_DOUBLE_EQ(risk_at_coverage(logs, 1.0), 0.5);
}

TEST(RiskCoverage, SixEpisodeHandCase) {
  std::vector<EpisodeLog> logs = {
      episode(0, 0.0, false, true), episode(1, 0.1, false, true), episode(2, 0.1, false, false),
      episode(3, 0.5, true, false), episode(4, 0.7, false, true), episode(5, 1.0, true, false)};
  const auto c = risk_coverage_curve(logs);
  // Thresholds 0, 0.1, 0.5, 0.7, 1.0.
  const std::vector<std::pair<double, double>> want = {
      {1.0 / 6, 0.0}, {3.0 / 6, 1.0 / 3}, {4.0 / 6, 2.0 / 4}, {5.0 / 6, 2.0 / 5}, {1.0, 3.0 / 6}};
  ASSERT_EQ(c.size(), want.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_DOUBLE_EQ(c[i].coverage, want[i].first);
    EXPECT_DOUBLE_EQ(c[i].risk, want[i].second);
  }
}

TEST(RiskCoverage, ThresholdBelowMinimumAddsZeroCoveragePoint) {
  std::vector<EpisodeLog> logs = {episode(0, 0.3, false, true), episode(1, 0.6, true, false)};
  const auto c = risk_coverage_curve(logs);
  EXPECT_DOUBLE_EQ(c.front().coverage, 0.0);
  EXPECT_DOUBLE_EQ(c.front().risk, 0.0);
}

TEST(CompareCurves, IdenticalAndDominated) {
  std::vector<EpisodeLog> a, b;
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const bool amb = i % 2 == 0;
    a.push_back(episode(i, amb ? 1.0 + rng.uniform() : rng.uniform(), amb, !amb, Split::test));
    b.push_back(episode(i, rng.uniform(), amb, !amb && rng.bernoulli(0.5), Split::test));
  }
  const auto levels = default_coverage_levels();
  const auto same = compare_risk_coverage(a, a, levels, 200, 1);
  EXPECT_DOUBLE_EQ(same.fraction_le, 1.0);
  EXPECT_DOUBLE_EQ(same.bootstrap_lower, 1.0);
  const auto cmp = compare_risk_coverage(a, b, levels, 200, 1);
  EXPECT_GE(cmp.fraction_le, 0.8);
  EXPECT_GE(cmp.bootstrap_lower, 0.8);
  b.pop_back();
  EXPECT_THROW(compare_risk_coverage(a, b, levels, 10, 1), ValidationError);
}

}  // namespace
}  // namespace vground
