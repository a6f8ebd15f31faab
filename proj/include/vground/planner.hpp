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

// Grammar-based sub-goal extraction and attribute-slot template resolution.
//
// Instruction grammar (lowercase tokens):
//   instruction := verb "the" description
//   verb        := "pick" "up" | "get" | "grab"
//   description := [size] [color] noun
//   noun        := category-word | "one"      ("one" needs size or color)
//   category-word := block | cube | mug | cup | bottle | fruit | apple
//
// Templates serialize as grasp_[size_][color_][category], e.g.
// grasp_green_mug, grasp_small_red, grasp_block.

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vground/gsm.hpp"
#include "vground/types.hpp"

namespace vground {

enum class AmbiguityLabel { unambiguous, ambiguous };

std::string_view to_string(AmbiguityLabel l);
std::optional<AmbiguityLabel> parse_ambiguity_label(std::string_view s);

struct Instruction {
  std::vector<std::string> tokens;
  AmbiguityLabel label = AmbiguityLabel::unambiguous;
  std::set<int> referent_ids;

  std::string text() const;
  // Throws ValidationError when label and referent count disagree.
  void validate() const;
};

std::vector<std::string> tokenize(std::string_view text);

enum class Verb { grasp };

struct SymbolicSubGoal {
  Verb verb = Verb::grasp;
  std::optional<Category> category;
  std::optional<Color> color;
  std::optional<Size> size;

  bool operator==(const SymbolicSubGoal&) const = default;

  int slot_count() const;
  bool matches(const ObjectAttributes& a) const;
  std::string canonical() const;
  // Inverse of canonical(); throws ParseError.
  static SymbolicSubGoal from_canonical(std::string_view s);
};

// Throws ParseError for token sequences outside the grammar.
SymbolicSubGoal extract_template(std::span<const std::string> tokens);
SymbolicSubGoal extract_template(const Instruction& instruction);

using CandidateSet = std::vector<EntityNode>;

// Every entity whose attribute block satisfies all set slots, in input order.
CandidateSet resolve_template(const SymbolicSubGoal& subgoal, const EntitySet& entities);

// Highest detection confidence; ties to the lowest id. Throws
// ValidationError on an empty candidate set.
const EntityNode& tiebreak_by_confidence(const CandidateSet& candidates);

// Slot one-hots (unset slot = zero block) plus a bias entry.
inline constexpr int kTemplateFeatureDim = kAttributeDim + 1;
Eigen::VectorXd template_features(const SymbolicSubGoal& subgoal);

// Bag of words over the grammar vocabulary plus a bias entry.
const std::vector<std::string>& instruction_vocabulary();
int instruction_feature_dim();
Eigen::VectorXd instruction_features(std::span<const std::string> tokens);

// Surface forms used to render descriptions.
const std::vector<std::string>& verb_phrases();
std::vector<std::string> category_words(Category c);
std::vector<std::string> render_instruction(const SymbolicSubGoal& subgoal,
                                            std::size_t verb_variant,
                                            std::size_t noun_variant);

}  // namespace vground
