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

#include "vground/errors.hpp"
#include "vground/planner.hpp"
#include "vground/rng.hpp"

namespace vground {
namespace {

EntityNode entity(int id, ObjectAttributes a, double confidence = 0.5) {
  EntityNode n;
  n.id = id;
  n.attr = one_hot(a);
  n.appearance = Eigen::VectorXd::Zero(kEntityDim);
  n.confidence = confidence;
  return n;
}

SymbolicSubGoal parse(std::string_view text) { return extract_template(tokenize(text)); }

TEST(ExtractTemplate, ColorAndCategory) {
  const auto g = parse("pick up the blue block");
  EXPECT_EQ(g.color, Color::blue);
  EXPECT_EQ(g.category, Category::block);
  EXPECT_FALSE(g.size);
  EXPECT_EQ(g.canonical(), "grasp_blue_block");
}

TEST(ExtractTemplate, ColorOnly) {
  const auto g = parse("get the red one");
  EXPECT_EQ(g.color, Color::red);
  EXPECT_FALSE(g.category);
}

TEST(ExtractTemplate, ParaphrasesShareTemplate) {
  EXPECT_EQ(parse("grab the apple"), parse("get the apple"));
  EXPECT_EQ(parse("pick up the cube"), parse("grab the block"));
  EXPECT_EQ(parse("get the small green cup"), parse("grab the small green mug"));
}

TEST(ExtractTemplate, EveryRenderingParsesBack) {
  for (int cls = 0; cls < kNumAttributeClasses; ++cls) {
    const auto a = attributes_from_class(cls);
    for (int mask = 1; mask < 8; ++mask) {
      SymbolicSubGoal g;
      if (mask & 1) g.category = a.category;
      if (mask & 2) g.color = a.color;
      if (mask & 4) g.size = a.size;
      if (!g.category && !g.color && !g.size) continue;
      for (std::size_t v = 0; v < verb_phrases().size(); ++v) {
        const auto tokens = render_instruction(g, v, 0);
        EXPECT_EQ(extract_template(tokens), g);
      }
      EXPECT_EQ(SymbolicSubGoal::from_canonical(g.canonical()), g);
    }
  }
}

TEST(ExtractTemplate, OutsideGrammarThrows) {
  EXPECT_THROW(parse("pick up the"), ParseError);
  EXPECT_THROW(parse("push the red block"), ParseError);
  EXPECT_THROW(parse("get the one"), ParseError);
  EXPECT_THROW(parse("get the red blue block"), ParseError);
  EXPECT_THROW(SymbolicSubGoal::from_canonical("lift_red"), ParseError);
}

TEST(ResolveTemplate, UniqueMatch) {
  const auto set = make_entity_set({entity(1, {Category::block, Color::blue, Size::small}),
                                    entity(2, {Category::block, Color::red, Size::small})});
  const auto c = resolve_template(parse("get the blue block"), set);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].id, 1);
}

TEST(ResolveTemplate, CategorySlotMatchesAll) {
  const auto set = make_entity_set({entity(1, {Category::block, Color::red, Size::small}),
                                    entity(2, {Category::block, Color::red, Size::large}),
                                    entity(3, {Category::block, Color::blue, Size::small})});
  EXPECT_EQ(resolve_template(parse("get the block"), set).size(), 3u);
}

TEST(ResolveTemplate, NoMatch) {
  const auto set = make_entity_set({entity(1, {Category::block, Color::red, Size::small}),
                                    entity(2, {Category::mug, Color::red, Size::large})});
  EXPECT_TRUE(resolve_template(parse("get the green one"), set).empty());
}

TEST(ResolveTemplate, MatchesAttributeFilterOracle) {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<EntityNode> nodes;
    std::vector<ObjectAttributes> attrs;
    const int n = rng.uniform_int(1, 6);
    for (int i = 0; i < n; ++i) {
      attrs.push_back(attributes_from_class(rng.uniform_int(0, kNumAttributeClasses - 1)));
      nodes.push_back(entity(i, attrs.back()));
    }
    SymbolicSubGoal g;
    if (rng.bernoulli(0.5)) g.category = kAllCategories[static_cast<std::size_t>(rng.uniform_int(0, 3))];
    if (rng.bernoulli(0.5)) g.color = kAllColors[static_cast<std::size_t>(rng.uniform_int(0, 3))];
    if (rng.bernoulli(0.5)) g.size = kAllSizes[static_cast<std::size_t>(rng.uniform_int(0, 1))];
    std::vector<int> want;
    for (int i = 0; i < n; ++i) {
      const auto& a = attrs[static_cast<std::size_t>(i)];
      if ((!g.category || *g.category == a.category) && (!g.color || *g.color == a.color) &&
          (!g.size || *g.size == a.size)) {
        want.push_back(i);
      }
    }
    std::vector<int> got;
    for (const auto& e : resolve_template(g, make_entity_set(nodes))) got.push_back(e.id);
    ASSERT_EQ(got, want);
  }
}

TEST(Tiebreak, HighestConfidence) {
  const CandidateSet c = {entity(4, {}, 0.9), entity(2, {}, 0.4)};
  EXPECT_EQ(tiebreak_by_confidence(c).id, 4);
}

TEST(Tiebreak, EqualConfidenceLowestId) {
  const CandidateSet c = {entity(5, {}, 0.7), entity(3, {}, 0.7), entity(8, {}, 0.7)};
  EXPECT_EQ(tiebreak_by_confidence(c).id, 3);
}

TEST(Tiebreak, MatchesLinearScan) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    CandidateSet c;
    const int n = rng.uniform_int(1, 7);
    for (int i = 0; i < n; ++i) {
      c.push_back(entity(rng.uniform_int(0, 50), {}, 0.1 * rng.uniform_int(1, 5)));
    }
    const EntityNode* best = &c[0];
    for (const auto& e : c) {
      if (e.confidence > best->confidence ||
          (e.confidence == best->confidence && e.id < best->id)) {
        best = &e;
      }
    }
    EXPECT_EQ(tiebreak_by_confidence(c).id, best->id);
  }
}

TEST(Tiebreak, EmptyThrows) { EXPECT_THROW(tiebreak_by_confidence({}), ValidationError); }

TEST(Instruction, LabelMustAgreeWithReferents) {
  Instruction ins;
  ins.tokens = tokenize("get the block");
  ins.label = AmbiguityLabel::ambiguous;
  ins.referent_ids = {1};
  EXPECT_THROW(ins.validate(), ValidationError);
  ins.referent_ids = {1, 2};
  EXPECT_NO_THROW(ins.validate());
}

}  // namespace
}  // namespace vground
