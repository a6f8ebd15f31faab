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

#include "gradcheck.hpp"
#include "vground/cab_bench.hpp"
#include "vground/errors.hpp"
#include "vground/learn.hpp"
#include "vground/theory.hpp"

namespace vground {
namespace {

const CabDataset& dataset() {
  static const CabDataset ds = build_dataset(0);
  return ds;
}

const Model& trained() {
  static const Model m = [] {
    TrainConfig c;
    c.steps = 300;
    return train(c, dataset()).model;
  }();
  return m;
}

Eigen::VectorXd embed(int symbol, int dim, std::uint64_t salt) {
  Rng rng = Rng::derive(salt, {static_cast<std::uint64_t>(symbol)});
  return testing::random_vector(rng, dim);
}

TEST(InfoNceBound, IndependentJointLossAtLeastLogN) {
  Rng rng(1);
  std::vector<BoundSample> samples;
  for (int i = 0; i < 4000; ++i) {
    const int s = rng.uniform_int(0, 7);
    const int e = rng.uniform_int(0, 7);
    samples.push_back({s, e, embed(s, 6, 1), embed(e, 6, 2)});
  }
  for (int n : {4, 8, 16}) {
    const auto r = infonce_bound(samples, n, 0.5, NegativeSampling::marginal, 4000, 3);
    EXPECT_GE(r.mean_loss + r.estimator_error, std::log(n)) << n;
    EXPECT_TRUE(r.satisfied);
    EXPECT_LT(r.mutual_information, 0.02);
  }
}

TEST(InfoNceBound, ConstantCriticIsExactlyLogN) {
  std::vector<BoundSample> samples;
  for (int i = 0; i < 50; ++i) samples.push_back({i % 5, i % 7, embed(i, 4, 5), embed(0, 4, 6)});
  const auto r = infonce_bound(samples, 8, 0.1, NegativeSampling::marginal, 100, 1);
  EXPECT_NEAR(r.mean_loss, std::log(8.0), 1e-12);
  EXPECT_NEAR(r.loss_se, 0.0, 1e-12);
}

TEST(InfoNceBound, BijectionWithPerfectCriticClosesTheGap) {
  std::vector<BoundSample> samples;
  for (int i = 0; i < 400; ++i) {
    const int c = i % 4;
    samples.push_back({c, c, Eigen::VectorXd::Unit(4, c), Eigen::VectorXd::Unit(4, c)});
  }
  const auto r = infonce_bound(samples, 4, 0.01, NegativeSampling::distinct_class, 1000, 2);
  EXPECT_NEAR(r.mutual_information, std::log(4.0), 1e-12);
  EXPECT_LT(r.mean_loss, 1e-12);
  EXPECT_GE(r.slack, 0.0);
  EXPECT_LE(r.slack, 0.05);
}

TEST(InfoNceBound, Validation) {
  std::vector<BoundSample> samples(3, {0, 0, Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(2)});
  EXPECT_THROW(infonce_bound(samples, 4, 0.1, NegativeSampling::marginal, 10, 0), ValidationError);
  EXPECT_THROW(infonce_bound(samples, 2, 0.1, NegativeSampling::distinct_class, 10, 0),
               ValidationError);
  EXPECT_THROW(infonce_bound(samples, 2, 0.1, NegativeSampling::marginal, 1, 0), ValidationError);
}

TEST(InfoNceBound, HoldsOnTrainedModel) {
  const Split splits[] = {Split::val, Split::test};
  const auto samples = bound_samples(trained(), dataset(), splits);
  EXPECT_EQ(samples.size(), dataset().instructions_in(Split::val).size() * 2);
  for (int n : {4, 8, 16}) {
    EXPECT_TRUE(infonce_bound(samples, n, 0.07, NegativeSampling::marginal, 500, 0).satisfied);
  }
}

TEST(Bottleneck, TrainedModelPasses) {
  const auto r = verify_bottleneck(trained(), dataset(), Split::test, 20, 3, 0);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.passed_episodes, 20);
  EXPECT_EQ(r.identical, r.replays);
}

TEST(Bottleneck, LeakyModelFails) {
  const auto m = Model::create(Ablation::lang_to_fast, 1, 1.0);
  const auto r = verify_bottleneck(m, dataset(), Split::test, 5, 3, 0);
  EXPECT_FALSE(r.passed);
  EXPECT_FALSE(r.violations.empty());
}

TEST(LanguageGrid, DecompositionHoldsAndIndicesInRange) {
  const auto r = language_grid(trained(), dataset(), Split::test);
  EXPECT_LE(r.decomposition.gap, 1e-6);
  for (const auto* e : {&r.goal, &r.subgoal, &r.instruction}) {
    EXPECT_GE(e->lambda_index, 0.0);
    EXPECT_LE(e->lambda_index, 1.0);
  }
  EXPECT_EQ(r.contexts, 8 * 4);
}

TEST(Robustness, ZeroMagnitudeBitExact) {
  RobustnessOptions o;
  o.episodes = 10;
  o.magnitudes = {0.02, 0.05, 0.1};
  const auto r = robustness_sweep(trained(), dataset(), Split::test, o);
  EXPECT_TRUE(r.zero_bit_exact);
  EXPECT_EQ(r.fits.size(), 4u);
  for (const auto& f : r.fits) EXPECT_TRUE(std::isfinite(f.slope));
}

TEST(Retrieval, CandidateSetsAreWellFormed) {
  for (int n : {8, 16, 32}) {
    const auto eps = retrieval_episodes(trained(), dataset(), Split::test, n, 0);
    EXPECT_EQ(eps.size(), 200u);
    for (const auto& e : eps) {
      ASSERT_EQ(static_cast<int>(e.logits.size()), n);
      ASSERT_EQ(e.true_id, 0);
      ASSERT_EQ(std::set<int>(e.candidate_ids.begin(), e.candidate_ids.end()).size(),
                static_cast<std::size_t>(n));
    }
  }
  EXPECT_THROW(retrieval_episodes(Model::create(Ablation::no_gsm, 0), dataset(), Split::test, 8, 0),
               ValidationError);
}

TEST(Retrieval, Deterministic) {
  const auto a = retrieval_episodes(trained(), dataset(), Split::test, 16, 4);
  const auto b = retrieval_episodes(trained(), dataset(), Split::test, 16, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].logits, b[i].logits);
}

}  // namespace
}  // namespace vground
