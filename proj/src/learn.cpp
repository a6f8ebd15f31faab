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

#include "vground/learn.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "vground/config.hpp"
#include "vground/digest.hpp"
#include "vground/errors.hpp"
#include "vground/losses.hpp"

namespace vground {

std::vector<AlignmentPair> generate_alignment_pairs(const Trajectory& trajectory,
                                                    const SymbolicSubGoal& subgoal,
                                                    std::span<const SceneGraph> tracks,
                                                    double segmenter_noise, Rng& rng) {
  if (trajectory.steps.empty()) throw ValidationError("trajectory has no steps");
  if (!(segmenter_noise >= 0.0 && segmenter_noise <= 1.0)) {
    throw ValidationError("segmenter noise must lie in [0, 1]");
  }
  const int t_end = static_cast<int>(trajectory.steps.size());
  const SceneGraph* graph = nullptr;
  for (const auto& g : tracks) {
    if (g.step == t_end) graph = &g;
  }
  if (!graph || graph->nodes.empty()) {
    throw ValidationError("no tracked entities at step " + std::to_string(t_end));
  }

  const EntityNode* best = nullptr;
  double best_d = 0.0;
  for (const auto& n : graph->nodes) {
    const double d = (n.position - trajectory.final_gripper).norm();
    if (!best || d < best_d || (d == best_d && n.id < best->id)) {
      best = &n;
      best_d = d;
    }
  }

  AlignmentPair pair;
  pair.subgoal = subgoal;
  pair.positive_entity_id = best->id;
  pair.scene_ref = trajectory.scene_id;
  pair.t_end = t_end;
  if (graph->nodes.size() > 1 && rng.bernoulli(segmenter_noise)) {
    std::vector<int> others;
    for (const auto& n : graph->nodes) {
      if (n.id != best->id) others.push_back(n.id);
    }
    pair.positive_entity_id =
        others[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(others.size()) - 1))];
    pair.label_noise_flag = true;
  }
  return {pair};
}

void TrainConfig::validate() const {
  auto bad = [](const std::string& key, const std::string& why) {
    throw ValidationError("train config '" + key + "': " + why);
  };
  if (!(tau > 0.0) || !std::isfinite(tau)) bad("tau", "must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) bad("lambda", "must be >= 0");
  if (ablation == Ablation::no_gac && lambda != 0.0) bad("lambda", "must be 0 for no_gac");
  if (!(lr > 0.0) || !std::isfinite(lr)) bad("lr", "must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) bad("momentum", "must lie in [0, 1)");
  if (steps < 0) bad("steps", "must be >= 0");
  if (batch_n < 2) bad("batch_n", "needs at least one negative");
  if (minibatch < 1) bad("minibatch", "must be >= 1");
  if (!(segmenter_noise >= 0.0 && segmenter_noise <= 1.0)) bad("segmenter_noise", "must lie in [0, 1]");
  if (augment_states < 0) bad("augment_states", "must be >= 0");
  if (!(augment_sigma >= 0.0)) bad("augment_sigma", "must be >= 0");
  if (!(layout_jitter >= 0.0)) bad("layout_jitter", "must be >= 0");
  if (!(attention_init_scale > 0.0)) bad("attention_init_scale", "must be positive");
  if (!(encoder_init_scale > 0.0)) bad("encoder_init_scale", "must be positive");
  if (!(grad_clip > 0.0)) bad("grad_clip", "must be positive");
  if (curve_every < 1) bad("curve_every", "must be >= 1");
}

std::string TrainConfig::canonical() const {
  std::map<std::string, std::string> kv;
  auto num = [](double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
  };
  kv["ablation"] = std::string(to_string(ablation));
  kv["attention_init_scale"] = num(attention_init_scale);
  kv["augment_sigma"] = num(augment_sigma);
  kv["augment_states"] = std::to_string(augment_states);
  kv["batch_n"] = std::to_string(batch_n);
  kv["curve_every"] = std::to_string(curve_every);
  kv["encoder_init_scale"] = num(encoder_init_scale);
  kv["grad_clip"] = num(grad_clip);
  kv["imitate_ambiguous"] = imitate_ambiguous ? "true" : "false";
  kv["lambda"] = num(lambda);
  kv["layout_jitter"] = num(layout_jitter);
  kv["lr"] = num(lr);
  kv["minibatch"] = std::to_string(minibatch);
  kv["momentum"] = num(momentum);
  kv["seed"] = std::to_string(seed);
  kv["segmenter_noise"] = num(segmenter_noise);
  kv["steps"] = std::to_string(steps);
  kv["tau"] = num(tau);
  kv["train_probes"] = train_probes ? "true" : "false";
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string TrainConfig::hash() const { return sha256_hex(canonical()); }

TrainConfig TrainConfig::from_kv(const std::map<std::string, std::string>& kv) {
  static const std::set<std::string> known = {
      "ablation", "attention_init_scale", "augment_sigma", "augment_states", "batch_n",
      "curve_every", "encoder_init_scale", "grad_clip", "imitate_ambiguous", "lambda",
      "layout_jitter", "lr", "minibatch",
      "momentum", "seed", "segmenter_noise", "steps", "tau", "train_probes"};
  for (const auto& [k, v] : kv) {
    if (!known.count(k)) throw ValidationError("unknown train config key '" + k + "'");
  }
  TrainConfig c;
  if (auto it = kv.find("ablation"); it != kv.end()) {
    auto a = parse_ablation(it->second);
    if (!a) throw ValidationError("train config 'ablation': unknown value '" + it->second + "'");
    c.ablation = *a;
  }
  if (c.ablation == Ablation::no_gac) c.lambda = 0.0;
  c.attention_init_scale = kv_double(kv, "attention_init_scale", c.attention_init_scale);
  c.augment_sigma = kv_double(kv, "augment_sigma", c.augment_sigma);
  c.augment_states = kv_int(kv, "augment_states", c.augment_states);
  c.batch_n = kv_int(kv, "batch_n", c.batch_n);
  c.curve_every = kv_int(kv, "curve_every", c.curve_every);
  c.encoder_init_scale = kv_double(kv, "encoder_init_scale", c.encoder_init_scale);
  c.grad_clip = kv_double(kv, "grad_clip", c.grad_clip);
  c.imitate_ambiguous = kv_bool(kv, "imitate_ambiguous", c.imitate_ambiguous);
  c.lambda = kv_double(kv, "lambda", c.lambda);
  c.layout_jitter = kv_double(kv, "layout_jitter", c.layout_jitter);
  c.lr = kv_double(kv, "lr", c.lr);
  c.minibatch = kv_int(kv, "minibatch", c.minibatch);
  c.momentum = kv_double(kv, "momentum", c.momentum);
  c.seed = kv_uint64(kv, "seed", c.seed);
  c.segmenter_noise = kv_double(kv, "segmenter_noise", c.segmenter_noise);
  c.steps = kv_int(kv, "steps", c.steps);
  c.tau = kv_double(kv, "tau", c.tau);
  c.train_probes = kv_bool(kv, "train_probes", c.train_probes);
  c.validate();
  return c;
}

namespace {

PolicyGradients zero_policy_grads(const PolicyParams& p) {
  PolicyGradients g;
  g.w1 = Eigen::MatrixXd::Zero(p.w1.rows(), p.w1.cols());
  g.b1 = Eigen::VectorXd::Zero(p.b1.size());
  g.w2 = Eigen::MatrixXd::Zero(p.w2.rows(), p.w2.cols());
  g.b2 = Eigen::VectorXd::Zero(p.b2.size());
  return g;
}

void add_policy(PolicyGradients& a, const PolicyGradients& b, double w) {
  a.w1 += w * b.w1;
  a.b1 += w * b.b1;
  a.w2 += w * b.w2;
  a.b2 += w * b.b2;
}

double policy_sq(const PolicyGradients& g) {
  return g.w1.squaredNorm() + g.b1.squaredNorm() + g.w2.squaredNorm() + g.b2.squaredNorm();
}

struct Contrast {
  GacResult result;
  // Where each candidate row came from: (state index, row); state 0 is the
  // item's own scene.
  std::vector<std::pair<std::size_t, int>> origin;
};

Contrast contrast(const Model& model, const TrainingItem& item, const TrainConfig& config,
                  const Eigen::VectorXd& query, std::vector<StateRows>& states) {
  const auto& own = states[0];
  const int pos = own.index_of(row_id_for(model, *item.scene, item.positive_object_id));
  if (pos < 0) throw ValidationError("alignment positive is not among the scene rows");
  Contrast c;
  c.origin.emplace_back(0, pos);
  const auto cap = static_cast<std::size_t>(config.batch_n);
  for (int i = 0; i < own.rows.rows() && c.origin.size() < cap; ++i) {
    if (i != pos) c.origin.emplace_back(0, i);
  }
  for (const auto& [scene, oid] : item.foreign_negatives) {
    if (c.origin.size() >= cap) break;
    states.push_back(observe_state(model, *scene));
    const int r = states.back().index_of(row_id_for(model, *scene, oid));
    if (r < 0) throw ValidationError("foreign negative is not among its scene rows");
    c.origin.emplace_back(states.size() - 1, r);
  }
  auto key = [&](const std::pair<std::size_t, int>& o) -> Eigen::VectorXd {
    return model.saca.key * states[o.first].rows.row(o.second).transpose();
  };
  const Eigen::VectorXd positive = key(c.origin[0]);
  std::vector<Eigen::VectorXd> negatives;
  for (std::size_t i = 1; i < c.origin.size(); ++i) negatives.push_back(key(c.origin[i]));
  c.result = gac_loss(query, positive, negatives, config.tau);
  return c;
}

double probe_pass(const PolicyParams& probe, const TrainingItem& item, PolicyGradients* grads) {
  double loss = 0.0;
  if (item.states.empty()) return loss;
  const double w = 1.0 / static_cast<double>(item.states.size());
  for (const auto& [q, expert] : item.states) {
    const auto out = policy_forward(probe_input(probe.conditioning, *item.scene, q, item.tokens), probe);
    const auto al = action_loss(out.raw, action_to_vector(expert));
    loss += w * al.loss;
    if (grads) add_policy(*grads, policy_backward(w * al.grad, out.cache, probe), 1.0);
  }
  return loss;
}

}  // namespace

ModelGradients ModelGradients::zeros(const Model& m) {
  ModelGradients g;
  g.encoder = Eigen::MatrixXd::Zero(m.encoder.weight.rows(), m.encoder.weight.cols());
  g.query = Eigen::MatrixXd::Zero(m.saca.query.rows(), m.saca.query.cols());
  g.key = Eigen::MatrixXd::Zero(m.saca.key.rows(), m.saca.key.cols());
  g.value = Eigen::MatrixXd::Zero(m.saca.value.rows(), m.saca.value.cols());
  g.policy = zero_policy_grads(m.policy);
  g.probe_subgoal = zero_policy_grads(m.probe_subgoal);
  g.probe_instruction = zero_policy_grads(m.probe_instruction);
  return g;
}

void ModelGradients::add(const ModelGradients& o, double w) {
  encoder += w * o.encoder;
  query += w * o.query;
  key += w * o.key;
  value += w * o.value;
  add_policy(policy, o.policy, w);
  add_policy(probe_subgoal, o.probe_subgoal, w);
  add_policy(probe_instruction, o.probe_instruction, w);
  action_loss += w * o.action_loss;
  gac_loss += w * o.gac_loss;
  probe_loss += w * o.probe_loss;
}

double ModelGradients::squared_norm() const {
  return encoder.squaredNorm() + query.squaredNorm() + key.squaredNorm() + value.squaredNorm() +
         policy_sq(policy);
}

ModelGradients item_gradients(const Model& model, const TrainingItem& item,
                              const TrainConfig& config) {
  ModelGradients G = ModelGradients::zeros(model);
  const Eigen::VectorXd features = query_features(model.ablation, item.tokens);
  std::vector<StateRows> states;
  states.reserve(1 + item.foreign_negatives.size());
  states.push_back(observe_state(model, *item.scene));
  const auto fwd = saca_forward(features, states[0].rows, states[0].ids, model.saca);

  // Contrastive term on (W_q s, W_k e).
  const Contrast c = contrast(model, item, config, fwd.cache.query, states);
  G.gac_loss = c.result.loss;
  std::vector<Eigen::MatrixXd> d_rows;
  for (const auto& s : states) d_rows.push_back(Eigen::MatrixXd::Zero(s.rows.rows(), s.rows.cols()));
  const double lam = config.lambda;
  if (lam > 0.0) {
    G.query += lam * c.result.grad_query * features.transpose();
    for (std::size_t i = 0; i < c.origin.size(); ++i) {
      const auto& [si, r] = c.origin[i];
      const Eigen::VectorXd& dk = i == 0 ? c.result.grad_positive : c.result.grad_negatives[i - 1];
      G.key += lam * dk * states[si].rows.row(r);
      d_rows[si].row(r) += lam * (model.saca.key.transpose() * dk).transpose();
    }
  }

  // Imitation term through the policy and attention.
  Eigen::VectorXd grad_g = Eigen::VectorXd::Zero(fwd.goal.g.size());
  const double w = item.states.empty() ? 0.0 : 1.0 / static_cast<double>(item.states.size());
  for (const auto& [q, expert] : item.states) {
    const auto out =
        policy_forward(policy_input(model, fwd.goal.g, *item.scene, q, item.tokens), model.policy);
    const auto al = action_loss(out.raw, action_to_vector(expert));
    G.action_loss += w * al.loss;
    const auto pg = policy_backward(w * al.grad, out.cache, model.policy);
    add_policy(G.policy, pg, 1.0);
    grad_g += pg.input.head(fwd.goal.g.size());
  }
  const auto sg = saca_backward(grad_g, fwd.cache, model.saca);
  G.query += sg.query;
  G.key += sg.key;
  G.value += sg.value;
  d_rows[0] += sg.entities;

  for (std::size_t si = 0; si < states.size(); ++si) {
    for (int r = 0; r < d_rows[si].rows(); ++r) {
      encoder_backward(d_rows[si].row(r).head<kEntityDim>().transpose(), states[si].caches[static_cast<std::size_t>(r)],
                       G.encoder);
    }
  }

  if (config.train_probes) {
    G.probe_loss = probe_pass(model.probe_subgoal, item, &G.probe_subgoal) +
                   probe_pass(model.probe_instruction, item, &G.probe_instruction);
  }
  return G;
}

double item_loss(const Model& model, const TrainingItem& item, const TrainConfig& config) {
  const Eigen::VectorXd features = query_features(model.ablation, item.tokens);
  std::vector<StateRows> states;
  states.reserve(1 + item.foreign_negatives.size());
  states.push_back(observe_state(model, *item.scene));
  const auto fwd = saca_forward(features, states[0].rows, states[0].ids, model.saca);
  const Contrast c = contrast(model, item, config, fwd.cache.query, states);
  double action = 0.0;
  const double w = item.states.empty() ? 0.0 : 1.0 / static_cast<double>(item.states.size());
  for (const auto& [q, expert] : item.states) {
    const auto out =
        policy_forward(policy_input(model, fwd.goal.g, *item.scene, q, item.tokens), model.policy);
    action += w * action_loss(out.raw, action_to_vector(expert)).loss;
  }
  return action + config.lambda * c.result.loss;
}

namespace {

struct Prepared {
  const CabScene* scene = nullptr;
  const CabInstruction* instruction = nullptr;
  Trajectory demo;
  AlignmentPair pair;
};

Vec3 clamp_to_table(Vec3 p) {
  for (int i = 0; i < 3; ++i) p(i) = std::clamp(p(i), 0.0, kTableMax[i]);
  return p;
}

void step_policy(PolicyParams& p, PolicyGradients& v, const PolicyGradients& g, double mu,
                 double lr) {
  v.w1 = mu * v.w1 + g.w1;
  v.b1 = mu * v.b1 + g.b1;
  v.w2 = mu * v.w2 + g.w2;
  v.b2 = mu * v.b2 + g.b2;
  p.w1 -= lr * v.w1;
  p.b1 -= lr * v.b1;
  p.w2 -= lr * v.w2;
  p.b2 -= lr * v.b2;
}

void clip(PolicyGradients& g, double max_norm) {
  const double n = std::sqrt(policy_sq(g));
  if (n > max_norm) {
    const double s = max_norm / n;
    g.w1 *= s;
    g.b1 *= s;
    g.w2 *= s;
    g.b2 *= s;
  }
}

}  // namespace

TrainResult train(const TrainConfig& config, const CabDataset& dataset) {
  config.validate();
  TrainResult result;
  Model& model = result.model;
  model = Model::create(config.ablation, config.seed, config.attention_init_scale,
                        config.encoder_init_scale);

  const auto scenes = dataset.scenes_in(Split::train);
  const auto instructions = dataset.instructions_in(Split::train);
  if (instructions.empty() || scenes.size() < 2) {
    throw ValidationError("training needs instructions and at least two training scenes");
  }

  Rng pair_rng = Rng::derive(config.seed, {0x7A1, 1});
  std::vector<Prepared> prepared;
  prepared.reserve(instructions.size());
  for (const auto* ins : instructions) {
    Prepared p;
    p.instruction = ins;
    p.scene = &dataset.scene(ins->scene_id);
    p.demo = scripted_demonstration(p.scene->scene, ins->demo_target_id);
    SceneGraph track;
    track.step = static_cast<int>(p.demo.steps.size());
    track.nodes = ground_truth_entities(p.scene->scene).entities;
    const SceneGraph tracks[] = {track};
    p.pair = generate_alignment_pairs(p.demo, extract_template(ins->instruction), tracks,
                                      config.segmenter_noise, pair_rng)
                 .front();
    prepared.push_back(std::move(p));
  }

  Rng rng = Rng::derive(config.seed, {0x7A1, 2});
  ModelGradients velocity = ModelGradients::zeros(model);
  for (int step = 1; step <= config.steps; ++step) {
    ModelGradients G = ModelGradients::zeros(model);
    std::vector<int> picked;
    std::vector<Scene> jittered(static_cast<std::size_t>(config.minibatch));
    for (int b = 0; b < config.minibatch; ++b) {
      const int idx = rng.uniform_int(0, static_cast<int>(prepared.size()) - 1);
      picked.push_back(prepared[static_cast<std::size_t>(idx)].instruction->instruction_id);
      const auto& p = prepared[static_cast<std::size_t>(idx)];
      TrainingItem item;
      item.scene = &p.scene->scene;
      if (config.layout_jitter > 0.0) {
        const Perturbation jitter{PerturbationKind::layout, config.layout_jitter, false,
                                  rng.engine()()};
        jittered[static_cast<std::size_t>(b)] = apply_perturbation(*item.scene, jitter).scene;
        item.scene = &jittered[static_cast<std::size_t>(b)];
      }
      item.tokens = p.instruction->instruction.tokens;
      item.positive_object_id = p.pair.positive_entity_id;
      const Vec3 target = item.scene->find(p.demo.target_id)->position;
      const bool imitate = config.imitate_ambiguous ||
                           p.instruction->instruction.label == AmbiguityLabel::unambiguous;
      if (imitate) {
        for (const auto& s : p.demo.steps) item.states.emplace_back(s.gripper, expert_step(s.gripper, target));
      }
      for (int a = 0; imitate && a < config.augment_states; ++a) {
        const auto& base =
            p.demo.steps[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(p.demo.steps.size()) - 1))];
        Vec3 q = base.gripper;
        for (int k = 0; k < 3; ++k) q(k) += config.augment_sigma * rng.normal();
        q = clamp_to_table(q);
        item.states.emplace_back(q, expert_step(q, target));
      }
      const int n_rows = static_cast<int>(model.entity_centric()
                                              ? item.scene->objects.size()
                                              : kPatchGrid * kPatchGrid);
      const int foreign = std::max(0, config.batch_n - n_rows);
      for (int f = 0; f < foreign; ++f) {
        const CabScene* other;
        do {
          other = scenes[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(scenes.size()) - 1))];
        } while (&other->scene == item.scene);
        const auto& objs = other->scene.objects;
        item.foreign_negatives.emplace_back(
            &other->scene,
            objs[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(objs.size()) - 1))].id);
      }
      G.add(item_gradients(model, item, config), 1.0 / config.minibatch);
    }

    LossReport report;
    report.step = step;
    report.action_loss = G.action_loss;
    report.gac_loss = G.gac_loss;
    report.total = G.action_loss + config.lambda * G.gac_loss;
    report.batch_n = config.batch_n;
    if (!std::isfinite(report.total) || !std::isfinite(G.squared_norm())) {
      nlohmann::json dump = {{"error", "non-finite loss"},
                             {"step", step},
                             {"action_loss", G.action_loss},
                             {"gac_loss", G.gac_loss},
                             {"instruction_ids", picked},
                             {"config", config.canonical()}};
      throw NumericalError(dump.dump());
    }
    if (step == 1 || step % config.curve_every == 0 || step == config.steps) {
      result.curve.push_back(report);
    }

    const double n = std::sqrt(G.squared_norm());
    if (n > config.grad_clip) {
      const double s = config.grad_clip / n;
      G.encoder *= s;
      G.query *= s;
      G.key *= s;
      G.value *= s;
      G.policy.w1 *= s;
      G.policy.b1 *= s;
      G.policy.w2 *= s;
      G.policy.b2 *= s;
    }
    clip(G.probe_subgoal, config.grad_clip);
    clip(G.probe_instruction, config.grad_clip);

    const double mu = config.momentum;
    const double lr = config.lr;
    velocity.encoder = mu * velocity.encoder + G.encoder;
    velocity.query = mu * velocity.query + G.query;
    velocity.key = mu * velocity.key + G.key;
    velocity.value = mu * velocity.value + G.value;
    model.encoder.weight -= lr * velocity.encoder;
    model.saca.query -= lr * velocity.query;
    model.saca.key -= lr * velocity.key;
    model.saca.value -= lr * velocity.value;
    ++model.saca.generation;
    step_policy(model.policy, velocity.policy, G.policy, mu, lr);
    if (config.train_probes) {
      step_policy(model.probe_subgoal, velocity.probe_subgoal, G.probe_subgoal, mu, lr);
      step_policy(model.probe_instruction, velocity.probe_instruction, G.probe_instruction, mu, lr);
    }
  }
  model.saca.generation = 0;
  return result;
}

std::string curve_csv(const std::vector<LossReport>& curve) {
  std::ostringstream s;
  s << std::setprecision(17) << "step,action_loss,gac_loss,total,batch_n\n";
  for (const auto& r : curve) {
    s << r.step << ',' << r.action_loss << ',' << r.gac_loss << ',' << r.total << ','
      << r.batch_n << '\n';
  }
  return s.str();
}

nlohmann::json to_json(const Checkpoint& c) {
  return {{"format", "vground-checkpoint"},
          {"version", c.version},
          {"config", c.config.canonical()},
          {"config_hash", c.config_hash},
          {"dataset_digest", c.dataset_digest},
          {"parameters", to_json(c.model)}};
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  Checkpoint c;
  try {
    if (j.at("format").get<std::string>() != "vground-checkpoint") {
      throw ValidationError("not a checkpoint file");
    }
    c.version = j.at("version").get<int>();
    if (c.version != kCheckpointVersion) {
      throw ValidationError("checkpoint version " + std::to_string(c.version) +
                            " is not supported (expected " +
                            std::to_string(kCheckpointVersion) + ")");
    }
    c.config = TrainConfig::from_kv(parse_kv(j.at("config").get<std::string>(), "checkpoint config"));
    c.config_hash = j.at("config_hash").get<std::string>();
    c.dataset_digest = j.at("dataset_digest").get<std::string>();
    c.model = model_from_json(j.at("parameters"));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed checkpoint: ") + e.what());
  }
  if (c.config_hash != c.config.hash()) {
    throw ValidationError("checkpoint config hash does not match its config");
  }
  if (c.model.ablation != c.config.ablation) {
    throw ValidationError("checkpoint parameters and config disagree on the ablation");
  }
  return c;
}

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
  write_file(path, to_json(c).dump() + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace vground
