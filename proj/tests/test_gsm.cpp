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

#include <set>

#include "vground/errors.hpp"
#include "vground/gsm.hpp"
#include "vground/rng.hpp"

namespace vground {
namespace {

EntityNode node(int id, int birth) {
  EntityNode n;
  n.id = id;
  n.birth_step = birth;
  n.appearance = Eigen::VectorXd::Unit(kEntityDim, id % kEntityDim);
  n.confidence = 0.5;
  return n;
}

SceneGraph graph_of(std::vector<EntityNode> nodes, int step = 0) {
  SceneGraph g;
  g.step = step;
  g.nodes = std::move(nodes);
  return g;
}

TEST(EncodeEntities, OneNodePerObject) {
  Scene s;
  for (int i = 0; i < 4; ++i) {
    s.objects.push_back({10 + i, {Category::fruit, Color::green, Size::large},
                         Vec3(0.2 + 0.15 * i, 0.4, 0.03)});
  }
  const auto g = encode_entities(s, std::nullopt, EncoderParams::random(1));
  ASSERT_EQ(g.nodes.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(g.nodes[static_cast<std::size_t>(i)].id, 10 + i);
    EXPECT_NEAR(g.nodes[static_cast<std::size_t>(i)].appearance.norm(), 1.0, 1e-12);
  }
}

TEST(EncodeEntities, ZeroPerturbationMatchesNone) {
  const Scene s = generate_scene(9, {});
  const auto params = EncoderParams::random(2);
  const auto a = encode_entities(s, std::nullopt, params);
  for (auto k : {PerturbationKind::viewpoint, PerturbationKind::lighting}) {
    const auto b = encode_entities(s, Perturbation{k, 0.0, false, 5}, params);
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
      EXPECT_EQ(a.nodes[i].appearance, b.nodes[i].appearance);
    }
  }
}

TEST(EntityMemory, EmptyPlusFour) {
  EntityMemory m;
  m.update(graph_of({node(1, 0), node(2, 0), node(3, 0), node(4, 0)}));
  EXPECT_EQ(m.size(), 4u);
}

TEST(EntityMemory, FullEvictsOldest) {
  EntityMemory m;
  for (int i = 0; i < 16; ++i) m.update(graph_of({node(i, i + 3)}));
  m.update(graph_of({node(99, 50)}));
  EXPECT_EQ(m.size(), 16u);
  for (const auto& n : m.nodes()) EXPECT_NE(n.birth_step, 3);
}

TEST(EntityMemory, SeventeenInsertsKeepLastSixteen) {
  EntityMemory m;
  for (int t = 0; t < 17; ++t) m.update(graph_of({node(t, t)}, t));
  std::set<int> births;
  for (const auto& n : m.nodes()) births.insert(n.birth_step);
  std::set<int> expected;
  for (int t = 1; t <= 16; ++t) expected.insert(t);
  EXPECT_EQ(births, expected);
}

// Reference FIFO: a stable sort by birth step, keep the youngest tail.
TEST(EntityMemory, MatchesReferenceUnderRandomInserts) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t cap = static_cast<std::size_t>(rng.uniform_int(1, 8));
    EntityMemory m(cap);
    std::vector<EntityNode> all;
    for (int round = 0; round < 10; ++round) {
      std::vector<EntityNode> batch;
      const int k = rng.uniform_int(0, 4);
      for (int j = 0; j < k; ++j) batch.push_back(node(round * 10 + j, rng.uniform_int(0, 20)));
      m.update(graph_of(batch));
      all.insert(all.end(), batch.begin(), batch.end());
      std::stable_sort(all.begin(), all.end(),
                       [](const EntityNode& a, const EntityNode& b) { return a.birth_step < b.birth_step; });
      if (all.size() > cap) all.erase(all.begin(), all.end() - static_cast<std::ptrdiff_t>(cap));
      std::multiset<std::pair<int, int>> want, got;
      for (const auto& n : all) want.insert({n.id, n.birth_step});
      for (const auto& n : m.nodes()) got.insert({n.id, n.birth_step});
      ASSERT_EQ(got, want);
    }
  }
}

TEST(AssembleEntitySet, EmptyMemoryEqualsGraph) {
  const auto g = graph_of({node(1, 0), node(2, 0)});
  const auto set = assemble_entity_set(g, EntityMemory{});
  EXPECT_EQ(set.ids(), (std::vector<int>{1, 2}));
  EXPECT_EQ(set.embeddings.rows(), 2);
}

TEST(AssembleEntitySet, DuplicateIdKeepsCurrentFrame) {
  EntityMemory m;
  auto stale = node(1, 0);
  stale.position = Vec3(0.9, 0.9, 0.0);
  m.update(graph_of({stale}));
  auto fresh = node(1, 5);
  fresh.position = Vec3(0.1, 0.1, 0.0);
  const auto set = assemble_entity_set(graph_of({fresh}, 5), m);
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(set.entities[0].birth_step, 5);
  EXPECT_EQ(set.entities[0].position, fresh.position);
}

TEST(AssembleEntitySet, DisjointUnion) {
  EntityMemory m;
  m.update(graph_of({node(7, 0), node(8, 0), node(9, 1)}));
  const auto set = assemble_entity_set(graph_of({node(1, 2), node(2, 2)}, 2), m);
  EXPECT_EQ(set.size(), 5u);
}

TEST(AssembleEntitySet, BothEmptyThrows) {
  EXPECT_THROW(assemble_entity_set(SceneGraph{}, EntityMemory{}), ValidationError);
}

TEST(Encoder, BackwardMatchesFiniteDifferences) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    auto params = EncoderParams::random(static_cast<std::uint64_t>(trial));
    Eigen::VectorXd input(kEncoderInputDim);
    for (int i = 0; i < input.size(); ++i) input(i) = rng.normal();
    Eigen::VectorXd up(kEntityDim);
    for (int i = 0; i < up.size(); ++i) up(i) = rng.normal();
    EncoderCache cache;
    encode_appearance(input, params, &cache);
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(params.weight.rows(), params.weight.cols());
    encoder_backward(up, cache, grad);
    const int r = rng.uniform_int(0, static_cast<int>(params.weight.rows()) - 1);
    const int c = rng.uniform_int(0, static_cast<int>(params.weight.cols()) - 1);
    const double h = 1e-6;
    auto f = [&](double delta) {
      auto p = params;
      p.weight(r, c) += delta;
      return up.dot(encode_appearance(input, p));
    };
    const double fd = (f(h) - f(-h)) / (2 * h);
    EXPECT_NEAR(grad(r, c), fd, 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

}  // namespace
}  // namespace vground
