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

#include "vground/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <tuple>

#include "vground/errors.hpp"

namespace vground {

ScoredEpisode scored(const EpisodeLog& e) {
  ScoredEpisode s;
  s.entropy = e.entropy;
  s.is_ambiguous = e.ambiguous();
  s.clarified = e.clarified();
  s.succeeded = e.succeeded;
  s.act_success = e.act_success;
  return s;
}

namespace {

struct Group {
  double score;
  std::int64_t pos;
  std::int64_t neg;
};

// Tie groups in descending score order.
std::vector<Group> groups_desc(std::span<const std::pair<double, bool>> scores) {
  std::vector<std::pair<double, bool>> s(scores.begin(), scores.end());
  for (const auto& [v, _] : s) {
    if (!std::isfinite(v)) throw ValidationError("scores must be finite");
  }
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<Group> g;
  for (const auto& [v, p] : s) {
    if (g.empty() || g.back().score != v) g.push_back({v, 0, 0});
    (p ? g.back().pos : g.back().neg) += 1;
  }
  return g;
}

void check_both(std::int64_t P, std::int64_t N) {
  if (P == 0 || N == 0) throw ValidationError("metric needs both positive and negative examples");
}

}  // namespace

double auroc(std::span<const std::pair<double, bool>> scores) {
  const auto g = groups_desc(scores);
  std::int64_t P = 0, N = 0;
  for (const auto& x : g) {
    P += x.pos;
    N += x.neg;
  }
  check_both(P, N);
  // Twice the number of correctly ordered pairs, ties counted once.
  std::int64_t twice = 0;
  std::int64_t neg_below = N;
  for (const auto& x : g) {
    neg_below -= x.neg;
    twice += 2 * x.pos * neg_below + x.pos * x.neg;
  }
  return static_cast<double>(twice) / static_cast<double>(2 * P * N);
}

double aupr(std::span<const std::pair<double, bool>> scores) {
  const auto g = groups_desc(scores);
  std::int64_t P = 0, N = 0;
  for (const auto& x : g) {
    P += x.pos;
    N += x.neg;
  }
  check_both(P, N);
  double ap = 0.0;
  std::int64_t tp = 0, fp = 0;
  for (const auto& x : g) {
    tp += x.pos;
    fp += x.neg;
    if (x.pos > 0) {
      ap += (static_cast<double>(x.pos) / static_cast<double>(P)) *
            (static_cast<double>(tp) / static_cast<double>(tp + fp));
    }
  }
  return ap;
}

double fpr_at_95(std::span<const std::pair<double, bool>> scores) {
  const auto g = groups_desc(scores);
  std::int64_t P = 0, N = 0;
  for (const auto& x : g) {
    P += x.pos;
    N += x.neg;
  }
  check_both(P, N);
  std::int64_t tp = 0, fp = 0;
  for (const auto& x : g) {
    tp += x.pos;
    fp += x.neg;
    if (100 * tp >= 95 * P) return static_cast<double>(fp) / static_cast<double>(N);
  }
  return 1.0;
}

double ece(std::span<const double> confidences, const std::vector<bool>& outcomes, int bins) {
  if (confidences.size() != outcomes.size()) throw ValidationError("ECE: size mismatch");
  if (confidences.empty()) throw ValidationError("ECE of an empty set");
  if (bins < 1) throw ValidationError("ECE needs at least one bin");
  std::vector<double> conf(static_cast<std::size_t>(bins), 0.0);
  std::vector<double> acc(static_cast<std::size_t>(bins), 0.0);
  std::vector<std::size_t> count(static_cast<std::size_t>(bins), 0);
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    const double c = confidences[i];
    if (!(c >= 0.0 && c <= 1.0)) throw ValidationError("ECE: confidence outside [0, 1]");
    const auto b = static_cast<std::size_t>(std::min(bins - 1, static_cast<int>(std::floor(c * bins))));
    conf[b] += c;
    acc[b] += outcomes[i] ? 1.0 : 0.0;
    ++count[b];
  }
  const double n = static_cast<double>(confidences.size());
  double e = 0.0;
  for (std::size_t b = 0; b < count.size(); ++b) {
    if (count[b] == 0) continue;
    const double m = static_cast<double>(count[b]);
    e += (m / n) * std::abs(acc[b] / m - conf[b] / m);
  }
  return e;
}

double cov_at_95(std::span<const ScoredEpisode> episodes) {
  if (episodes.empty()) throw ValidationError("Cov@95 of an empty set");
  std::vector<ScoredEpisode> s(episodes.begin(), episodes.end());
  std::stable_sort(s.begin(), s.end(),
                   [](const auto& a, const auto& b) { return a.entropy < b.entropy; });
  std::size_t k = 0, ok = 0;
  double best = 0.0;
  while (k < s.size()) {
    const double h = s[k].entropy;
    while (k < s.size() && s[k].entropy == h) {
      ok += s[k].act_success ? 1 : 0;
      ++k;
    }
    if (100 * ok >= 95 * k) best = static_cast<double>(k) / static_cast<double>(s.size());
  }
  return best;
}

double clar_at_ambig(std::span<const ScoredEpisode> episodes) {
  std::size_t n = 0, c = 0;
  for (const auto& e : episodes) {
    if (!e.is_ambiguous) continue;
    ++n;
    if (e.clarified) ++c;
  }
  if (n == 0) throw ValidationError("Clar@Ambig without ambiguous episodes");
  return static_cast<double>(c) / static_cast<double>(n);
}

double unambig_sr(std::span<const ScoredEpisode> episodes) {
  std::size_t n = 0, s = 0;
  for (const auto& e : episodes) {
    if (e.is_ambiguous) continue;
    ++n;
    if (e.succeeded) ++s;
  }
  if (n == 0) throw ValidationError("Unambig SR without unambiguous episodes");
  return static_cast<double>(s) / static_cast<double>(n);
}

double normalized_confidence(double entropy, std::size_t n) {
  if (n <= 1) return 1.0;
  return std::clamp(1.0 - entropy / std::log(static_cast<double>(n)), 0.0, 1.0);
}

int retrieval_rank(const RetrievalEpisode& e) {
  if (e.logits.size() != e.candidate_ids.size()) {
    throw ValidationError("retrieval: logits and candidates differ in length");
  }
  std::optional<std::size_t> t;
  for (std::size_t i = 0; i < e.candidate_ids.size(); ++i) {
    if (e.candidate_ids[i] == e.true_id) {
      if (t) throw ValidationError("retrieval: true entity listed twice");
      t = i;
    }
  }
  if (!t) throw ValidationError("retrieval: true entity is not among the candidates");
  int rank = 1;
  for (std::size_t i = 0; i < e.logits.size(); ++i) {
    if (i != *t && e.logits[i] >= e.logits[*t]) ++rank;
  }
  return rank;
}

double recall_at_k(std::span<const RetrievalEpisode> episodes, int k) {
  if (episodes.empty()) throw ValidationError("Recall@k of an empty set");
  if (k < 1) throw ValidationError("Recall@k needs k >= 1");
  std::size_t hit = 0;
  for (const auto& e : episodes) {
    if (retrieval_rank(e) <= k) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(episodes.size());
}

namespace {

template <typename K>
double entropy_of(const std::map<K, std::size_t>& counts, double n) {
  double h = 0.0;
  for (const auto& [_, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double plugin_entropy(std::span<const int> x) {
  if (x.empty()) throw ValidationError("entropy of an empty sample");
  std::map<int, std::size_t> c;
  for (int v : x) ++c[v];
  return entropy_of(c, static_cast<double>(x.size()));
}

double plugin_mutual_information(std::span<const std::pair<int, int>> xy) {
  if (xy.empty()) throw ValidationError("mutual information of an empty sample");
  std::map<int, std::size_t> cx, cy;
  std::map<std::pair<int, int>, std::size_t> cxy;
  for (const auto& [x, y] : xy) {
    ++cx[x];
    ++cy[y];
    ++cxy[{x, y}];
  }
  const double n = static_cast<double>(xy.size());
  return std::max(0.0, entropy_of(cx, n) + entropy_of(cy, n) - entropy_of(cxy, n));
}

double plugin_conditional_mi(std::span<const std::tuple<int, int, int>> xyc) {
  if (xyc.empty()) throw ValidationError("conditional mutual information of an empty sample");
  std::map<int, std::vector<std::pair<int, int>>> by_c;
  for (const auto& [x, y, c] : xyc) by_c[c].emplace_back(x, y);
  const double n = static_cast<double>(xyc.size());
  double mi = 0.0;
  for (const auto& [_, v] : by_c) {
    mi += (static_cast<double>(v.size()) / n) * plugin_mutual_information(v);
  }
  return mi;
}

double miller_madow_mi_bias(std::span<const std::pair<int, int>> xy) {
  if (xy.empty()) throw ValidationError("bias of an empty sample");
  std::map<int, std::size_t> cx, cy;
  std::map<std::pair<int, int>, std::size_t> cxy;
  for (const auto& [x, y] : xy) {
    ++cx[x];
    ++cy[y];
    ++cxy[{x, y}];
  }
  const double k = static_cast<double>(cxy.size()) - static_cast<double>(cx.size()) -
                   static_cast<double>(cy.size()) + 1.0;
  return k / (2.0 * static_cast<double>(xy.size()));
}

LanguageInfluenceEstimate language_influence(std::span<const LanguageTrace> traces,
                                             int instruction_space_size) {
  if (instruction_space_size < 2) throw ValidationError("language influence needs |L| >= 2");
  if (traces.empty()) throw ValidationError("language influence of an empty trace set");
  std::vector<std::tuple<int, int, int>> t;
  for (const auto& r : traces) {
    if (!r.action_symbol) {
      throw ValidationError("language influence requires quantized actions");
    }
    if (r.instruction < 0 || r.instruction >= instruction_space_size) {
      throw ValidationError("instruction index outside the instruction space");
    }
    t.emplace_back(r.instruction, *r.action_symbol, r.context);
  }
  LanguageInfluenceEstimate e;
  e.instruction_space_size = instruction_space_size;
  e.mi_nats = plugin_conditional_mi(t);
  e.lambda_index =
      std::clamp(1.0 - e.mi_nats / std::log(static_cast<double>(instruction_space_size)), 0.0, 1.0);
  return e;
}

DecompositionCheck language_decomposition(std::span<const LanguageTrace> traces) {
  if (traces.empty()) throw ValidationError("decomposition of an empty trace set");
  std::vector<std::tuple<int, int, int>> la, lg, lga;
  std::map<std::pair<int, int>, int> joint_context;
  for (const auto& r : traces) {
    if (!r.action_symbol || !r.goal_symbol) {
      throw ValidationError("decomposition needs quantized actions and goal symbols");
    }
    la.emplace_back(r.instruction, *r.action_symbol, r.context);
    lg.emplace_back(r.instruction, *r.goal_symbol, r.context);
    auto [it, _] = joint_context.emplace(std::make_pair(*r.action_symbol, r.context),
                                         static_cast<int>(joint_context.size()));
    lga.emplace_back(r.instruction, *r.goal_symbol, it->second);
  }
  DecompositionCheck d;
  d.direct = plugin_conditional_mi(la);
  d.through_goal = plugin_conditional_mi(lg) - plugin_conditional_mi(lga);
  d.gap = std::abs(d.direct - d.through_goal);
  return d;
}

int quantize_action(const ActionVector& a, int bins) {
  if (bins < 1) throw ValidationError("quantization needs at least one bin");
  auto bin = [bins](double v, double lo, double hi) {
    const int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
    return std::clamp(b, 0, bins - 1);
  };
  int symbol = 0;
  for (int i = 0; i < 3; ++i) symbol = symbol * bins + bin(a.delta(i), -kMaxStepLength, kMaxStepLength);
  return symbol * bins + bin(a.grip, 0.0, 1.0);
}

nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json recall = nlohmann::json::object();
  for (const auto& [n, v] : r.recall_at_1) recall[std::to_string(n)] = v;
  nlohmann::json j = {{"model", r.model},
                      {"AUROC", r.auroc},
                      {"AUPR", r.aupr},
                      {"ECE", r.ece},
                      {"Cov@95", r.cov_at_95},
                      {"FPR@95", r.fpr_at_95},
                      {"Clar@Ambig", r.clar_at_ambig},
                      {"Unambig SR", r.unambig_sr},
                      {"Unambig SR (always act)", r.always_act_unambig_sr},
                      {"threshold", r.threshold},
                      {"mean_entropy_ambiguous", r.mean_entropy_ambiguous},
                      {"mean_entropy_unambiguous", r.mean_entropy_unambiguous},
                      {"Recall@1", recall},
                      {"episodes", r.episodes}};
  j["language_ignorance"] = r.language_ignorance ? nlohmann::json(*r.language_ignorance)
                                                 : nlohmann::json(nullptr);
  return j;
}

MetricsReport metrics_report_from_json(const nlohmann::json& j) {
  MetricsReport r;
  try {
    r.model = j.at("model").get<std::string>();
    r.auroc = j.at("AUROC").get<double>();
    r.aupr = j.at("AUPR").get<double>();
    r.ece = j.at("ECE").get<double>();
    r.cov_at_95 = j.at("Cov@95").get<double>();
    r.fpr_at_95 = j.at("FPR@95").get<double>();
    r.clar_at_ambig = j.at("Clar@Ambig").get<double>();
    r.unambig_sr = j.at("Unambig SR").get<double>();
    r.always_act_unambig_sr = j.at("Unambig SR (always act)").get<double>();
    r.threshold = j.at("threshold").get<double>();
    r.mean_entropy_ambiguous = j.at("mean_entropy_ambiguous").get<double>();
    r.mean_entropy_unambiguous = j.at("mean_entropy_unambiguous").get<double>();
    for (const auto& [k, v] : j.at("Recall@1").items()) {
      r.recall_at_1.emplace_back(std::stoi(k), v.get<double>());
    }
    std::sort(r.recall_at_1.begin(), r.recall_at_1.end());
    r.episodes = j.at("episodes").get<std::size_t>();
    if (!j.at("language_ignorance").is_null()) {
      r.language_ignorance = j.at("language_ignorance").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed metrics report: ") + e.what());
  }
  return r;
}

}  // namespace vground
