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

#include "vground/planner.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "vground/errors.hpp"

namespace vground {

namespace {

std::optional<Category> noun_category(std::string_view w) {
  if (w == "block" || w == "cube") return Category::block;
  if (w == "mug" || w == "cup") return Category::mug;
  if (w == "bottle") return Category::bottle;
  if (w == "fruit" || w == "apple") return Category::fruit;
  return std::nullopt;
}

std::string join(std::span<const std::string> tokens) {
  std::string s;
  for (const auto& t : tokens) {
    if (!s.empty()) s += ' ';
    s += t;
  }
  return s;
}

}  // namespace

std::string_view to_string(AmbiguityLabel l) {
  return l == AmbiguityLabel::ambiguous ? "ambiguous" : "unambiguous";
}

std::optional<AmbiguityLabel> parse_ambiguity_label(std::string_view s) {
  if (s == "ambiguous") return AmbiguityLabel::ambiguous;
  if (s == "unambiguous") return AmbiguityLabel::unambiguous;
  return std::nullopt;
}

std::string Instruction::text() const { return join(tokens); }

void Instruction::validate() const {
  const bool ok = label == AmbiguityLabel::ambiguous ? referent_ids.size() >= 2
                                                     : referent_ids.size() == 1;
  if (!ok) {
    throw ValidationError("instruction '" + text() + "' labelled " +
                          std::string(to_string(label)) + " has " +
                          std::to_string(referent_ids.size()) + " referents");
  }
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

int SymbolicSubGoal::slot_count() const {
  return static_cast<int>(category.has_value()) + static_cast<int>(color.has_value()) +
         static_cast<int>(size.has_value());
}

bool SymbolicSubGoal::matches(const ObjectAttributes& a) const {
  return (!category || *category == a.category) && (!color || *color == a.color) &&
         (!size || *size == a.size);
}

std::string SymbolicSubGoal::canonical() const {
  std::string s = "grasp";
  if (size) s += "_" + std::string(to_string(*size));
  if (color) s += "_" + std::string(to_string(*color));
  if (category) s += "_" + std::string(to_string(*category));
  return s;
}

SymbolicSubGoal SymbolicSubGoal::from_canonical(std::string_view s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == '_') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  if (parts.size() < 2 || parts.front() != "grasp") {
    throw ParseError("not a template: '" + std::string(s) + "'");
  }
  SymbolicSubGoal g;
  // Slots appear in size, color, category order.
  int stage = 0;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto& p = parts[i];
    if (auto z = parse_size(p); z && stage < 1) {
      g.size = z;
      stage = 1;
    } else if (auto c = parse_color(p); c && stage < 2) {
      g.color = c;
      stage = 2;
    } else if (auto k = parse_category(p); k && stage < 3) {
      g.category = k;
      stage = 3;
    } else {
      throw ParseError("bad template slot '" + p + "' in '" + std::string(s) + "'");
    }
  }
  return g;
}

SymbolicSubGoal extract_template(std::span<const std::string> tokens) {
  auto fail = [&](const std::string& why) -> ParseError {
    return ParseError("instruction '" + join(tokens) + "' outside grammar: " + why);
  };
  std::size_t i = 0;
  if (tokens.size() >= 2 && tokens[0] == "pick" && tokens[1] == "up") {
    i = 2;
  } else if (!tokens.empty() && (tokens[0] == "get" || tokens[0] == "grab")) {
    i = 1;
  } else {
    throw fail("expected a verb phrase");
  }
  if (i >= tokens.size() || tokens[i] != "the") throw fail("expected 'the'");
  ++i;

  SymbolicSubGoal g;
  if (i < tokens.size()) {
    if (auto z = parse_size(tokens[i])) {
      g.size = z;
      ++i;
    }
  }
  if (i < tokens.size()) {
    if (auto c = parse_color(tokens[i])) {
      g.color = c;
      ++i;
    }
  }
  if (i + 1 != tokens.size()) throw fail("expected exactly one noun at the end");
  const auto& noun = tokens[i];
  if (noun == "one") {
    if (!g.size && !g.color) throw fail("'one' needs a size or color");
  } else if (auto k = noun_category(noun)) {
    g.category = k;
  } else {
    throw fail("unknown noun '" + noun + "'");
  }
  return g;
}

SymbolicSubGoal extract_template(const Instruction& instruction) {
  return extract_template(instruction.tokens);
}

CandidateSet resolve_template(const SymbolicSubGoal& subgoal, const EntitySet& entities) {
  CandidateSet out;
  for (const auto& e : entities.entities) {
    if (subgoal.matches(decode_attributes(e.attr))) out.push_back(e);
  }
  return out;
}

const EntityNode& tiebreak_by_confidence(const CandidateSet& candidates) {
  if (candidates.empty()) throw ValidationError("no candidates to break ties over");
  const EntityNode* best = &candidates.front();
  for (const auto& c : candidates) {
    if (c.confidence > best->confidence ||
        (c.confidence == best->confidence && c.id < best->id)) {
      best = &c;
    }
  }
  return *best;
}

Eigen::VectorXd template_features(const SymbolicSubGoal& subgoal) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(kTemplateFeatureDim);
  if (subgoal.category) f(static_cast<int>(*subgoal.category)) = 1.0;
  if (subgoal.color) f(kNumCategories + static_cast<int>(*subgoal.color)) = 1.0;
  if (subgoal.size) f(kNumCategories + kNumColors + static_cast<int>(*subgoal.size)) = 1.0;
  f(kAttributeDim) = 1.0;
  return f;
}

const std::vector<std::string>& instruction_vocabulary() {
  static const std::vector<std::string> vocab = {
      "pick", "up",    "get",   "grab",   "the",    "one",   "block",
      "cube", "mug",   "cup",   "bottle", "fruit",  "apple", "red",
      "green", "blue", "yellow", "small", "large"};
  return vocab;
}

int instruction_feature_dim() {
  return static_cast<int>(instruction_vocabulary().size()) + 1;
}

Eigen::VectorXd instruction_features(std::span<const std::string> tokens) {
  const auto& vocab = instruction_vocabulary();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(instruction_feature_dim());
  for (const auto& t : tokens) {
    auto it = std::find(vocab.begin(), vocab.end(), t);
    if (it == vocab.end()) throw ParseError("token '" + t + "' outside vocabulary");
    f(static_cast<int>(it - vocab.begin())) += 1.0;
  }
  f(f.size() - 1) = 1.0;
  return f;
}

const std::vector<std::string>& verb_phrases() {
  static const std::vector<std::string> v = {"pick up", "get", "grab"};
  return v;
}

std::vector<std::string> category_words(Category c) {
  switch (c) {
    case Category::block: return {"block", "cube"};
    case Category::mug: return {"mug", "cup"};
    case Category::bottle: return {"bottle"};
    case Category::fruit: return {"fruit", "apple"};
  }
  return {};
}

std::vector<std::string> render_instruction(const SymbolicSubGoal& subgoal,
                                            std::size_t verb_variant,
                                            std::size_t noun_variant) {
  if (subgoal.slot_count() == 0) {
    throw ValidationError("cannot render a template with no slots");
  }
  std::vector<std::string> t = tokenize(verb_phrases()[verb_variant % verb_phrases().size()]);
  t.emplace_back("the");
  if (subgoal.size) t.emplace_back(to_string(*subgoal.size));
  if (subgoal.color) t.emplace_back(to_string(*subgoal.color));
  if (subgoal.category) {
    const auto words = category_words(*subgoal.category);
    t.push_back(words[noun_variant % words.size()]);
  } else {
    t.emplace_back("one");
  }
  return t;
}

}  // namespace vground
