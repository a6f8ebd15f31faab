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

#include "gradcheck.hpp"
#include "vground/errors.hpp"
#include "vground/saca.hpp"

namespace vground {
namespace {

using testing::random_matrix;
using testing::random_vector;

std::vector<int> iota(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

TEST(SacaForward, SingleEntity) {
  const auto p = SacaParams::random(1, 5, 6, 4, 1.0);
  Rng rng(1);
  const Eigen::MatrixXd rows = random_matrix(rng, 1, 6);
  const auto r = saca_forward(random_vector(rng, 5), rows, iota(1), p);
  EXPECT_EQ(r.goal.alpha.size(), 1);
  EXPECT_DOUBLE_EQ(r.goal.alpha(0), 1.0);
  EXPECT_EQ(r.goal.entropy, 0.0);
  EXPECT_LT((r.goal.g - p.value * rows.row(0).transpose()).norm(), 1e-12);
}

TEST(SacaForward, EqualLogitsGiveUniform) {
  const auto p = SacaParams::random(2, 5, 6, 4, 1.0);
  Rng rng(2);
  Eigen::MatrixXd rows(4, 6);
  const Eigen::RowVectorXd r0 = random_matrix(rng, 1, 6);
  for (int i = 0; i < 4; ++i) rows.row(i) = r0;
  const auto r = saca_forward(random_vector(rng, 5), rows, iota(4), p);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.goal.alpha(i), 0.25, 1e-15);
  EXPECT_NEAR(r.goal.entropy, std::log(4.0), 1e-12);
  EXPECT_NEAR(r.goal.entropy, 1.3863, 5e-5);
}

// Straight-line recomputation with no shared code.
TEST(SacaForward, MatchesDenseRecomputation) {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto p = SacaParams::random(static_cast<std::uint64_t>(t), 7, 9, 5, 1.0);
    const Eigen::VectorXd s = random_vector(rng, 7);
    const Eigen::MatrixXd E = random_matrix(rng, 5, 9);
    const auto r = saca_forward(s, E, iota(5), p);

    std::vector<double> logits(5), alpha(5);
    double mx = -1e300;
    for (int i = 0; i < 5; ++i) {
      double l = 0.0;
      for (int a = 0; a < 5; ++a) {
        double q = 0.0, k = 0.0;
        for (int j = 0; j < 7; ++j) q += p.query(a, j) * s(j);
        for (int j = 0; j < 9; ++j) k += p.key(a, j) * E(i, j);
        l += q * k;
      }
      logits[static_cast<std::size_t>(i)] = l / std::sqrt(5.0);
      mx = std::max(mx, logits[static_cast<std::size_t>(i)]);
    }
    double z = 0.0;
    for (int i = 0; i < 5; ++i) z += std::exp(logits[static_cast<std::size_t>(i)] - mx);
    double h = 0.0;
    for (int i = 0; i < 5; ++i) {
      alpha[static_cast<std::size_t>(i)] = std::exp(logits[static_cast<std::size_t>(i)] - mx) / z;
      h -= alpha[static_cast<std::size_t>(i)] * std::log(alpha[static_cast<std::size_t>(i)]);
    }
    for (int a = 0; a < 5; ++a) {
      double g = 0.0;
      for (int i = 0; i < 5; ++i) {
        double v = 0.0;
        for (int j = 0; j < 9; ++j) v += p.value(a, j) * E(i, j);
        g += alpha[static_cast<std::size_t>(i)] * v;
      }
      EXPECT_NEAR(r.goal.g(a), g, 1e-9);
    }
    EXPECT_NEAR(r.goal.entropy, h, 1e-9);
  }
}

TEST(SacaForward, EmptyThrows) {
  const auto p = SacaParams::random(1, 5, 6, 4);
  EXPECT_THROW(saca_forward(Eigen::VectorXd::Ones(5), Eigen::MatrixXd(0, 6), {}, p),
               ValidationError);
}

TEST(SacaBackward, ZeroUpstreamGivesZero) {
  const auto p = SacaParams::random(4, 5, 6, 4, 1.0);
  Rng rng(4);
  const auto fwd = saca_forward(random_vector(rng, 5), random_matrix(rng, 3, 6), iota(3), p);
  const auto g = saca_backward(Eigen::VectorXd::Zero(4), fwd.cache, p);
  EXPECT_EQ(g.query.norm(), 0.0);
  EXPECT_EQ(g.key.norm(), 0.0);
  EXPECT_EQ(g.value.norm(), 0.0);
  EXPECT_EQ(g.entities.norm(), 0.0);
}

TEST(SacaBackward, ThreeEntityFiniteDifferences) {
  const auto r = testing::check_saca(100, 5);
  EXPECT_EQ(r.instances, 100);
  EXPECT_LT(r.max_relative_error, 1e-4);
}

TEST(SacaBackward, DuplicateRowsGetEqualGradients) {
  const auto p = SacaParams::random(6, 5, 6, 4, 1.0);
  Rng rng(6);
  Eigen::MatrixXd rows = random_matrix(rng, 3, 6);
  rows.row(2) = rows.row(0);
  const auto fwd = saca_forward(random_vector(rng, 5), rows, iota(3), p);
  const auto g = saca_backward(random_vector(rng, 4), fwd.cache, p);
  EXPECT_LT((g.entities.row(0) - g.entities.row(2)).norm(), 1e-12);
}

TEST(SacaBackward, StaleCacheRejected) {
  auto p = SacaParams::random(7, 5, 6, 4, 1.0);
  Rng rng(7);
  const auto fwd = saca_forward(random_vector(rng, 5), random_matrix(rng, 3, 6), iota(3), p);
  ++p.generation;
  EXPECT_THROW(saca_backward(Eigen::VectorXd::Ones(4), fwd.cache, p), ValidationError);
  const auto other = SacaParams::random(7, 5, 6, 4, 1.0);
  EXPECT_THROW(saca_backward(Eigen::VectorXd::Ones(4), fwd.cache, other), ValidationError);
}

TEST(AttentionEntropy, OneHotAndUniform) {
  for (int n = 1; n <= 64; ++n) {
    Eigen::VectorXd one = Eigen::VectorXd::Zero(n);
    one(n - 1) = 1.0;
    EXPECT_EQ(attention_entropy(one), 0.0);
    EXPECT_NEAR(attention_entropy(Eigen::VectorXd::Constant(n, 1.0 / n)), std::log(n), 1e-12);
  }
}

TEST(AttentionEntropy, HandCase) {
  Eigen::VectorXd a(3);
  a << 0.5, 0.25, 0.25;
  EXPECT_NEAR(attention_entropy(a), 1.5 * std::log(2.0), 1e-15);
  EXPECT_NEAR(attention_entropy(a), 1.0397, 5e-5);
}

TEST(AttentionEntropy, BoundedOverRandomDistributions) {
  Rng rng(9);
  for (int t = 0; t < 10000; ++t) {
    const int n = rng.uniform_int(1, 40);
    Eigen::VectorXd logits(n);
    const double scale = rng.uniform(0.0, 20.0);
    for (int i = 0; i < n; ++i) logits(i) = scale * rng.normal();
    const double h = attention_entropy(softmax(logits));
    ASSERT_GE(h, 0.0);
    ASSERT_LE(h, std::log(n) + 1e-12);
  }
}

TEST(AttentionEntropy, RejectsNonDistribution) {
  Eigen::VectorXd a(2);
  a << 0.7, 0.7;
  EXPECT_THROW(attention_entropy(a), ValidationError);
}

}  // namespace
}  // namespace vground
