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

#include "vground/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include "vground/audit.hpp"
#include "vground/errors.hpp"
#include "vground/losses.hpp"
#include "vground/pipeline.hpp"
#include "vground/rng.hpp"

namespace vground {

std::string_view to_string(NegativeSampling s) {
  return s == NegativeSampling::marginal ? "marginal" : "distinct_class";
}

namespace {

// k distinct indices from [0, n) excluding `skip`, by partial Fisher-Yates.
std::vector<int> draw_distinct(int n, int k, int skip, Rng& rng) {
  std::vector<int> pool;
  pool.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (i != skip) pool.push_back(i);
  }
  for (int i = 0; i < k; ++i) {
    const int j = rng.uniform_int(i, static_cast<int>(pool.size()) - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

int symbol_of(std::map<std::string, int>& table, const std::string& key) {
  return table.emplace(key, static_cast<int>(table.size())).first->second;
}

Eigen::Vector4d as_vector(const ActionVector& a) {
  return Eigen::Vector4d(a.delta.x(), a.delta.y(), a.delta.z(), a.grip);
}

bool same_bits(const ActionVector& a, const ActionVector& b) {
  return a.delta.x() == b.delta.x() && a.delta.y() == b.delta.y() && a.delta.z() == b.delta.z() &&
         a.grip == b.grip;
}

std::vector<const CabInstruction*> unambiguous_in(const CabDataset& ds, Split split) {
  std::vector<const CabInstruction*> out;
  for (const auto* ins : ds.instructions_in(split)) {
    if (ins->instruction.label == AmbiguityLabel::unambiguous) out.push_back(ins);
  }
  return out;
}

}  // namespace

BoundReport infonce_bound(std::span<const BoundSample> samples, int batch_n, double tau,
                          NegativeSampling sampling, int batches, std::uint64_t seed) {
  if (batch_n < 2) throw ValidationError("the bound needs batch_n >= 2");
  if (batches < 2) throw ValidationError("the bound needs at least two batches");
  if (!(tau > 0.0)) throw ValidationError("temperature must be positive");
  if (samples.size() < static_cast<std::size_t>(batch_n)) {
    throw ValidationError("fewer samples than batch_n");
  }
  std::map<int, std::vector<int>> by_class;
  std::vector<std::pair<int, int>> joint;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    by_class[samples[i].e_class].push_back(static_cast<int>(i));
    joint.emplace_back(samples[i].s_symbol, samples[i].e_class);
  }
  std::vector<int> classes;
  for (const auto& [c, _] : by_class) classes.push_back(c);
  if (sampling == NegativeSampling::distinct_class &&
      classes.size() < static_cast<std::size_t>(batch_n)) {
    throw ValidationError("fewer entity classes than batch_n");
  }

  BoundReport r;
  r.batch_n = batch_n;
  r.sampling = sampling;
  r.samples = samples.size();
  r.batches = batches;
  r.mutual_information = plugin_mutual_information(joint);
  r.miller_madow = miller_madow_mi_bias(joint);

  Rng rng = Rng::derive(seed, {0xB0, static_cast<std::uint64_t>(batch_n),
                               static_cast<std::uint64_t>(sampling)});
  const int n = static_cast<int>(samples.size());
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int b = 0; b < batches; ++b) {
    const int i = rng.uniform_int(0, n - 1);
    std::vector<Eigen::VectorXd> negatives;
    if (sampling == NegativeSampling::marginal) {
      for (int j : draw_distinct(n, batch_n - 1, i, rng)) {
        negatives.push_back(samples[static_cast<std::size_t>(j)].key);
      }
    } else {
      const auto own = std::find(classes.begin(), classes.end(), samples[static_cast<std::size_t>(i)].e_class);
      const int skip = static_cast<int>(own - classes.begin());
      for (int c : draw_distinct(static_cast<int>(classes.size()), batch_n - 1, skip, rng)) {
        const auto& members = by_class[classes[static_cast<std::size_t>(c)]];
        const int j = members[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(members.size()) - 1))];
        negatives.push_back(samples[static_cast<std::size_t>(j)].key);
      }
    }
    const auto& s = samples[static_cast<std::size_t>(i)];
    const double loss = gac_loss(s.query, s.key, negatives, tau).loss;
    sum += loss;
    sum_sq += loss * loss;
  }
  const double m = static_cast<double>(batches);
  r.mean_loss = sum / m;
  const double var = std::max(0.0, (sum_sq - m * r.mean_loss * r.mean_loss) / (m - 1.0));
  r.loss_se = std::sqrt(var / m);
  r.estimator_error = 2.0 * r.loss_se;
  r.lower_bound = std::log(static_cast<double>(batch_n)) - r.mean_loss;
  r.slack = r.mutual_information + r.estimator_error - r.lower_bound;
  r.satisfied = r.slack >= 0.0;
  if (!std::isfinite(r.mean_loss)) throw NumericalError("non-finite contrastive loss in the bound");
  return r;
}

std::vector<BoundSample> bound_samples(const Model& model, const CabDataset& dataset,
                                       std::span<const Split> splits) {
  std::map<std::string, int> symbols;
  std::map<int, StateRows> rows;
  std::vector<BoundSample> out;
  for (Split split : splits) {
    for (const auto* ins : dataset.instructions_in(split)) {
      const Scene& scene = dataset.scene(ins->scene_id).scene;
      auto it = rows.find(scene.id);
      if (it == rows.end()) it = rows.emplace(scene.id, observe_state(model, scene)).first;
      const auto& tokens = ins->instruction.tokens;
      BoundSample s;
      s.s_symbol = symbol_of(symbols, model.ablation == Ablation::no_planner
                                          ? ins->instruction.text()
                                          : extract_template(tokens).canonical());
      const WorldObject* target = scene.find(ins->demo_target_id);
      if (!target) throw ValidationError("demo target missing from its scene");
      s.e_class = attribute_class(target->attrs);
      s.query = model.saca.query * query_features(model.ablation, tokens);
      const int r = it->second.index_of(row_id_for(model, scene, ins->demo_target_id));
      s.key = model.saca.key * it->second.rows.row(r).transpose();
      out.push_back(std::move(s));
    }
  }
  return out;
}

BottleneckReport verify_bottleneck(const Model& model, const CabDataset& dataset, Split split,
                                   int episodes, int alternatives, std::uint64_t seed) {
  const auto ins = dataset.instructions_in(split);
  if (episodes < 1 || static_cast<std::size_t>(episodes) > ins.size()) {
    throw ValidationError("bottleneck check: episode count outside the split size");
  }
  if (alternatives < 1) throw ValidationError("bottleneck check needs alternatives");
  Rng rng = Rng::derive(seed, {0xB77});
  BottleneckReport r;
  r.episodes = episodes;
  for (int e = 0; e < episodes; ++e) {
    const auto& instruction = *ins[static_cast<std::size_t>(e)];
    const Scene& scene = dataset.scene(instruction.scene_id).scene;
    const EpisodeLog log = run_episode(model, scene, instruction);
    std::vector<std::vector<std::string>> alts;
    while (static_cast<int>(alts.size()) < alternatives) {
      const auto& other = dataset.instructions[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(dataset.instructions.size()) - 1))];
      if (other.instruction.tokens != instruction.instruction.tokens) {
        alts.push_back(other.instruction.tokens);
      }
    }
    const AuditReport a = bottleneck_audit(log, model, scene, alts);
    r.replays += a.replays;
    r.identical += a.identical;
    if (a.passed) ++r.passed_episodes;
    for (const auto& v : a.violations) {
      r.violations.push_back("episode " + std::to_string(instruction.instruction_id) + ": " + v);
    }
  }
  r.passed = r.passed_episodes == episodes;
  return r;
}

LanguageGridReport language_grid(const Model& model, const CabDataset& dataset, Split split,
                                 const LanguageGridOptions& options) {
  const int k = options.instructions_per_context;
  if (k < 2) throw ValidationError("the language grid needs at least two instructions per context");
  if (options.starts.empty()) throw ValidationError("the language grid needs gripper starts");

  std::map<int, std::vector<const CabInstruction*>> per_scene;
  for (const auto* ins : unambiguous_in(dataset, split)) {
    auto& list = per_scene[ins->scene_id];
    if (static_cast<int>(list.size()) >= k) continue;
    const int target = *ins->instruction.referent_ids.begin();
    const bool seen = std::any_of(list.begin(), list.end(), [&](const CabInstruction* o) {
      return *o->instruction.referent_ids.begin() == target;
    });
    if (!seen) list.push_back(ins);
  }

  std::vector<LanguageTrace> goal, subgoal, instruction;
  std::map<std::vector<double>, int> goal_symbols;
  int context = 0;
  for (const auto& [scene_id, list] : per_scene) {
    if (static_cast<int>(list.size()) < k) continue;
    const Scene& scene = dataset.scene(scene_id).scene;
    std::vector<Eigen::VectorXd> goals;
    for (const auto* ins : list) goals.push_back(ground(model, scene, ins->instruction.tokens).attention.goal.g);
    for (const auto& start : options.starts) {
      for (int l = 0; l < k; ++l) {
        const auto& tokens = list[static_cast<std::size_t>(l)]->instruction.tokens;
        const auto& g = goals[static_cast<std::size_t>(l)];
        const std::vector<double> bits(g.data(), g.data() + g.size());
        const int gs = goal_symbols.emplace(bits, static_cast<int>(goal_symbols.size())).first->second;
        const ActionVector a = act(model, g, scene, start, tokens);
        goal.push_back({context, l, quantize_action(a, options.bins), gs});
        const auto ps = policy_forward(probe_input(PolicyConditioning::subgoal, scene, start, tokens),
                                       model.probe_subgoal);
        subgoal.push_back({context, l, quantize_action(ps.action, options.bins), std::nullopt});
        const auto pi = policy_forward(
            probe_input(PolicyConditioning::instruction, scene, start, tokens),
            model.probe_instruction);
        instruction.push_back({context, l, quantize_action(pi.action, options.bins), std::nullopt});
      }
      ++context;
    }
  }
  if (context == 0) throw ValidationError("no scene offers enough distinct unambiguous targets");

  LanguageGridReport r;
  r.contexts = context;
  r.instruction_space = k;
  r.bins = options.bins;
  r.goal = language_influence(goal, k);
  r.subgoal = language_influence(subgoal, k);
  r.instruction = language_influence(instruction, k);
  r.decomposition = language_decomposition(goal);
  r.goal_lowest = r.goal.lambda_index < r.subgoal.lambda_index &&
                  r.goal.lambda_index < r.instruction.lambda_index;
  return r;
}

RobustnessReport robustness_sweep(const Model& model, const CabDataset& dataset, Split split,
                                  const RobustnessOptions& options) {
  if (options.magnitudes.size() < 2) throw ValidationError("the sweep needs two magnitudes or more");
  for (double m : options.magnitudes) {
    if (!(m > 0.0)) throw ValidationError("sweep magnitudes must be positive");
  }
  auto list = unambiguous_in(dataset, split);
  if (list.empty()) throw ValidationError("no unambiguous instructions in the split");
  if (static_cast<int>(list.size()) > options.episodes) list.resize(static_cast<std::size_t>(options.episodes));

  struct Clean {
    const Scene* scene;
    const CabInstruction* ins;
    ActionVector action;
  };
  auto first_action = [&](const Scene& scene, const CabInstruction& ins,
                          const std::optional<Perturbation>& p) {
    const Grounded g = ground(model, scene, ins.instruction.tokens, p);
    return act(model, g.attention.goal.g, g.observed, scene.gripper_position, ins.instruction.tokens);
  };
  std::vector<Clean> clean;
  for (const auto* ins : list) {
    const Scene& scene = dataset.scene(ins->scene_id).scene;
    clean.push_back({&scene, ins, first_action(scene, *ins, std::nullopt)});
  }
  auto perturbation = [&](PerturbationKind kind, double m, const CabInstruction& ins) {
    Perturbation p;
    p.kind = kind;
    p.magnitude = m;
    p.seed = options.seed * 1000003ULL + static_cast<std::uint64_t>(ins.instruction_id);
    return p;
  };

  RobustnessReport r;
  r.zero_bit_exact = true;
  for (auto kind : options.kinds) {
    for (const auto& c : clean) {
      if (!same_bits(first_action(*c.scene, *c.ins, perturbation(kind, 0.0, *c.ins)), c.action)) {
        r.zero_bit_exact = false;
      }
    }
  }

  r.passed = r.zero_bit_exact;
  for (auto kind : options.kinds) {
    std::vector<RobustnessPoint> pts;
    for (double m : options.magnitudes) {
      RobustnessPoint p;
      p.kind = kind;
      p.magnitude = m;
      for (const auto& c : clean) {
        const ActionVector a = first_action(*c.scene, *c.ins, perturbation(kind, m, *c.ins));
        const double d = (as_vector(a) - as_vector(c.action)).norm();
        p.mean_displacement += d / static_cast<double>(clean.size());
        p.max_displacement = std::max(p.max_displacement, d);
      }
      pts.push_back(p);
    }
    RobustnessFit f;
    f.kind = kind;
    const double n = static_cast<double>(pts.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : pts) {
      mx += p.magnitude / n;
      my += p.mean_displacement / n;
    }
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : pts) {
      sxx += (p.magnitude - mx) * (p.magnitude - mx);
      sxy += (p.magnitude - mx) * (p.mean_displacement - my);
      syy += (p.mean_displacement - my) * (p.mean_displacement - my);
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (const auto& p : pts) {
      const double e = p.mean_displacement - (f.intercept + f.slope * p.magnitude);
      ss_res += e * e;
    }
    f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    const auto& first = *std::min_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
      return a.magnitude < b.magnitude;
    });
    const double base = first.mean_displacement / first.magnitude;
    f.at_most_linear = std::all_of(pts.begin(), pts.end(), [&](const RobustnessPoint& p) {
      return p.mean_displacement / p.magnitude <= 2.0 * base;
    });
    r.passed = r.passed && std::isfinite(f.slope) && f.at_most_linear;
    r.fits.push_back(f);
    r.points.insert(r.points.end(), pts.begin(), pts.end());
  }
  return r;
}

std::vector<RetrievalEpisode> retrieval_episodes(const Model& model, const CabDataset& dataset,
                                                 Split split, int n, std::uint64_t seed) {
  if (!model.entity_centric()) throw ValidationError("retrieval needs entity rows");
  if (n < 1) throw ValidationError("candidate set size must be positive");
  std::map<int, StateRows> rows;
  for (const auto& cs : dataset.scenes) rows.emplace(cs.scene.id, observe_state(model, cs.scene));

  std::vector<RetrievalEpisode> out;
  for (const auto* ins : unambiguous_in(dataset, split)) {
    const Scene& scene = dataset.scene(ins->scene_id).scene;
    const auto& own = rows.at(scene.id);
    const SymbolicSubGoal subgoal = extract_template(ins->instruction.tokens);
    const int target = *ins->instruction.referent_ids.begin();
    const int t = own.index_of(target);

    // Own rows, the target first when the set must be cut.
    std::vector<Eigen::VectorXd> cand;
    cand.push_back(own.rows.row(t).transpose());
    for (int i = 0; i < own.rows.rows() && static_cast<int>(cand.size()) < n; ++i) {
      if (i != t) cand.push_back(own.rows.row(i).transpose());
    }
    std::vector<std::pair<int, int>> pool;  // (scene id, row)
    for (const auto& [sid, sr] : rows) {
      if (sid == scene.id) continue;
      const Scene& other = dataset.scene(sid).scene;
      for (int i = 0; i < sr.rows.rows(); ++i) {
        if (!subgoal.matches(other.find(sr.ids[static_cast<std::size_t>(i)])->attrs)) {
          pool.emplace_back(sid, i);
        }
      }
    }
    const int need = n - static_cast<int>(cand.size());
    if (need > static_cast<int>(pool.size())) {
      throw ValidationError("not enough non-matching distractors for N = " + std::to_string(n));
    }
    Rng rng = Rng::derive(seed, {0x2E7, static_cast<std::uint64_t>(ins->instruction_id),
                                 static_cast<std::uint64_t>(n)});
    for (int j : draw_distinct(static_cast<int>(pool.size()), need, -1, rng)) {
      const auto& [sid, i] = pool[static_cast<std::size_t>(j)];
      cand.push_back(rows.at(sid).rows.row(i).transpose());
    }

    Eigen::MatrixXd m(static_cast<int>(cand.size()), kRowDim);
    RetrievalEpisode e;
    for (int i = 0; i < m.rows(); ++i) {
      m.row(i) = cand[static_cast<std::size_t>(i)].transpose();
      e.candidate_ids.push_back(i);
    }
    e.true_id = 0;
    const auto res = saca_forward(query_features(model.ablation, ins->instruction.tokens), m,
                                  e.candidate_ids, model.saca);
    e.logits.assign(res.goal.logits.data(), res.goal.logits.data() + res.goal.logits.size());
    out.push_back(std::move(e));
  }
  return out;
}

nlohmann::json to_json(const BoundReport& r) {
  return {{"batch_n", r.batch_n},
          {"sampling", std::string(to_string(r.sampling))},
          {"samples", r.samples},
          {"batches", r.batches},
          {"mutual_information", r.mutual_information},
          {"miller_madow_bias", r.miller_madow},
          {"mean_gac_loss", r.mean_loss},
          {"gac_loss_se", r.loss_se},
          {"estimator_error", r.estimator_error},
          {"log_n_minus_loss", r.lower_bound},
          {"slack", r.slack},
          {"satisfied", r.satisfied}};
}

nlohmann::json to_json(const BottleneckReport& r) {
  return {{"episodes", r.episodes},     {"replays", r.replays},
          {"identical", r.identical},   {"passed_episodes", r.passed_episodes},
          {"violations", r.violations}, {"passed", r.passed}};
}

namespace {

nlohmann::json estimate_json(const LanguageInfluenceEstimate& e) {
  return {{"mi_nats", e.mi_nats},
          {"lambda_index", e.lambda_index},
          {"instruction_space_size", e.instruction_space_size}};
}

}  // namespace

nlohmann::json to_json(const LanguageGridReport& r) {
  return {{"contexts", r.contexts},
          {"instruction_space", r.instruction_space},
          {"bins", r.bins},
          {"g", estimate_json(r.goal)},
          {"s", estimate_json(r.subgoal)},
          {"L", estimate_json(r.instruction)},
          {"decomposition",
           {{"direct", r.decomposition.direct},
            {"through_goal", r.decomposition.through_goal},
            {"gap", r.decomposition.gap}}},
          {"g_lowest", r.goal_lowest}};
}

nlohmann::json to_json(const RobustnessReport& r) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : r.points) {
    points.push_back({{"kind", std::string(to_string(p.kind))},
                      {"magnitude", p.magnitude},
                      {"mean_displacement", p.mean_displacement},
                      {"max_displacement", p.max_displacement}});
  }
  nlohmann::json fits = nlohmann::json::array();
  for (const auto& f : r.fits) {
    fits.push_back({{"kind", std::string(to_string(f.kind))},
                    {"slope", f.slope},
                    {"intercept", f.intercept},
                    {"r2", f.r2},
                    {"at_most_linear", f.at_most_linear}});
  }
  return {{"points", points},
          {"fits", fits},
          {"zero_bit_exact", r.zero_bit_exact},
          {"passed", r.passed}};
}

}  // namespace vground
