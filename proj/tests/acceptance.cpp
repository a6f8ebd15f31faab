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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Trains the full and no_gac configs from
// configs/ on the seed-0 benchmark, so expect a few minutes of runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "oracles.hpp"
#include "vground/cab_bench.hpp"
#include "vground/cli.hpp"
#include "vground/digest.hpp"
#include "vground/errors.hpp"
#include "vground/metrics.hpp"
#include "vground/pipeline.hpp"
#include "vground/saca.hpp"
#include "vground/theory.hpp"

#ifndef VGROUND_SOURCE_DIR
#error "VGROUND_SOURCE_DIR must point at the source tree"
#endif

namespace vground {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  std::ostringstream s;
  s.precision(2);
  s << std::scientific << v;
  return s.str();
}

std::string num(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << std::fixed << v;
  return s.str();
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(read_file(p)); }

// Runs the CLI pipeline once and keeps the outputs around for the criteria.
class Pipeline {
 public:
  Pipeline() : root_(fs::temp_directory_path() / "vground_acceptance") {
    fs::remove_all(root_);
    fs::create_directories(root_);
    const fs::path configs = fs::path(VGROUND_SOURCE_DIR) / "configs";
    cmd_gen_bench(0, data());
    EvalCommandOptions eval_options;
    eval_options.workers = env_workers();
    for (const std::string model : {"full", "no_gac"}) {
      const auto t0 = std::chrono::steady_clock::now();
      cmd_train(configs / (model + ".cfg"), data(), root_ / model, std::nullopt);
      train_seconds_[model] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      cmd_eval(root_ / model / "checkpoint.json", data(), root_ / (model + "-eval"), eval_options);
      try {
        cmd_verify_theory(root_ / model / "checkpoint.json", data(), root_ / (model + "-theory"), {});
      } catch (const NumericalError&) {
        // theory.json is written before the throw; the criterion reads it.
      }
      metrics_[model] = metrics_report_from_json(load(root_ / (model + "-eval") / "metrics.json"));
      theory_[model] = load(root_ / (model + "-theory") / "theory.json");
    }
    cmd_report({root_ / "full-eval", root_ / "no_gac-eval"}, root_ / "report", 0);
    report_ = load(root_ / "report" / "report.json");
  }

  fs::path data() const { return root_ / "data"; }
  const MetricsReport& metrics(const std::string& m) const { return metrics_.at(m); }
  const nlohmann::json& theory(const std::string& m) const { return theory_.at(m); }
  const nlohmann::json& report() const { return report_; }
  double train_seconds(const std::string& m) const { return train_seconds_.at(m); }

 private:
  fs::path root_;
  std::map<std::string, MetricsReport> metrics_;
  std::map<std::string, nlohmann::json> theory_;
  std::map<std::string, double> train_seconds_;
  nlohmann::json report_;
};

double recall(const MetricsReport& r, int n) {
  for (const auto& [k, v] : r.recall_at_1) {
    if (k == n) return v;
  }
  return -1.0;
}

Outcome gradients() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::pair<std::string, testing::GradCheck>> checks = {
      {"saca", testing::check_saca(100, 1)},     {"gac", testing::check_gac(100, 2)},
      {"action", testing::check_action_loss(100, 3)}, {"encoder", testing::check_encoder(100, 4)},
      {"policy", testing::check_policy(100, 5)}, {"model", testing::check_model(100, 6)}};
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome o{seconds < 10.0, ""};
  for (const auto& [name, c] : checks) {
    o.pass = o.pass && c.instances >= 100 && c.max_relative_error < 1e-4;
    o.detail += name + " " + std::to_string(c.instances) + "x err " + sci(c.max_relative_error) + ", ";
  }
  o.detail += num(seconds, 2) + " s";
  return o;
}

Eigen::VectorXd embed(int symbol, int dim, std::uint64_t salt) {
  Rng rng = Rng::derive(salt, {static_cast<std::uint64_t>(symbol)});
  return testing::random_vector(rng, dim);
}

Outcome bound(const Pipeline& p) {
  Outcome o{true, ""};
  for (const std::string model : {"full", "no_gac"}) {
    const auto& t = p.theory(model);
    o.pass = o.pass && t.at("bound_satisfied").get<bool>();
    o.detail += model + ":";
    for (const auto& b : t.at("infonce_bound")) {
      o.detail += " N=" + std::to_string(b.at("batch_n").get<int>()) + " " +
                  num(b.at("log_n_minus_loss").get<double>()) + "<=" +
                  num(b.at("mutual_information").get<double>()) + "+" +
                  num(b.at("estimator_error").get<double>());
    }
    o.detail += "; ";
  }

  Rng rng(1);
  std::vector<BoundSample> independent;
  for (int i = 0; i < 4000; ++i) {
    const int s = rng.uniform_int(0, 7);
    const int e = rng.uniform_int(0, 7);
    independent.push_back({s, e, embed(s, 6, 1), embed(e, 6, 2)});
  }
  bool corner = true;
  for (int n : {4, 8, 16}) {
    const auto r = infonce_bound(independent, n, 0.5, NegativeSampling::marginal, 4000, 3);
    corner = corner && r.mean_loss + r.estimator_error >= std::log(n);
  }
  std::vector<BoundSample> bijection;
  for (int i = 0; i < 400; ++i) {
    const int c = i % 4;
    bijection.push_back({c, c, Eigen::VectorXd::Unit(4, c), Eigen::VectorXd::Unit(4, c)});
  }
  const auto r = infonce_bound(bijection, 4, 0.01, NegativeSampling::distinct_class, 1000, 2);
  corner = corner && r.slack >= 0.0 && r.slack <= 0.05;
  o.pass = o.pass && corner;
  o.detail += "corner cases " + std::string(corner ? "ok" : "FAILED") + " (bijection slack " + sci(r.slack) + ")";
  return o;
}

Outcome bottleneck(const Pipeline& p) {
  const auto& t = p.theory("full");
  const auto& b = t.at("bottleneck");
  const double gap = t.at("language_grid").at("decomposition").at("gap").get<double>();
  const int episodes = b.at("episodes").get<int>();
  const int passed = b.at("passed_episodes").get<int>();
  return {episodes == 100 && passed == 100 && std::abs(gap) <= 1e-6,
          std::to_string(passed) + "/" + std::to_string(episodes) + " episodes identical (" +
              std::to_string(b.at("identical").get<int>()) + "/" +
              std::to_string(b.at("replays").get<int>()) + " replays), decomposition gap " + sci(gap)};
}

Outcome entropy() {
  bool ok = true;
  for (int n = 1; n <= 64; ++n) {
    for (int k = 0; k < n; ++k) ok = ok && attention_entropy(Eigen::VectorXd::Unit(n, k)) == 0.0;
    ok = ok && std::abs(attention_entropy(Eigen::VectorXd::Constant(n, 1.0 / n)) - std::log(n)) <= 1e-12;
  }
  Rng rng(7);
  int in_range = 0;
  for (int i = 0; i < 10000; ++i) {
    const int n = rng.uniform_int(1, 12);
    Eigen::VectorXd logits(n);
    const double scale = 0.1 * rng.uniform_int(0, 100);
    for (int j = 0; j < n; ++j) logits(j) = scale * rng.normal();
    const double h = attention_entropy(softmax(logits));
    in_range += h >= 0.0 && h <= std::log(n) + 1e-12;
  }
  return {ok && in_range == 10000, "one-hot and uniform exact for n<=64; " +
                                       std::to_string(in_range) + "/10000 random in [0, ln n]"};
}

Outcome separation(const Pipeline& p) {
  const double full = p.metrics("full").auroc;
  const double ablated = p.metrics("no_gac").auroc;
  return {full >= 0.75 && full > ablated, "AUROC full " + num(full) + " vs no_gac " + num(ablated) +
                                              " (full trained in " + num(p.train_seconds("full"), 0) +
                                              " s)"};
}

Outcome selective(const Pipeline& p) {
  const auto& cmp = p.report().at("risk_coverage_full_vs_no_gac");
  const double fraction = cmp.at("fraction_le").get<double>();
  const double lower = cmp.at("bootstrap_p10").get<double>();
  const auto& m = p.metrics("full");
  const double drop = m.always_act_unambig_sr - m.unambig_sr;
  return {fraction >= 0.8 && lower >= 0.8 && m.clar_at_ambig > 0.5 && drop <= 0.05,
          "full<=no_gac at " + num(100 * fraction, 1) + "% of levels (bootstrap p10 " +
              num(100 * lower, 1) + "%), Clar@Ambig " + num(m.clar_at_ambig, 3) + ", SR " +
              num(m.unambig_sr, 3) + " vs always-act " + num(m.always_act_unambig_sr, 3)};
}

Outcome retrieval(const Pipeline& p) {
  bool ok = true;
  std::string detail;
  for (int n : {8, 16, 32}) {
    const double a = recall(p.metrics("full"), n);
    const double b = recall(p.metrics("no_gac"), n);
    ok = ok && a > b;
    detail += "N=" + std::to_string(n) + " " + num(a, 3) + " vs " + num(b, 3) + "; ";
  }
  const double chance3 = 3.0 / 8.0;
  ok = ok && recall(p.metrics("full"), 8) >= chance3 && recall(p.metrics("no_gac"), 8) >= chance3;
  return {ok, detail + "3x chance at N=8 is " + num(chance3, 3)};
}

Outcome ignorance(const Pipeline& p) {
  const auto& g = p.theory("full").at("language_grid");
  const double lg = g.at("g").at("lambda_index").get<double>();
  const double ls = g.at("s").at("lambda_index").get<double>();
  const double ll = g.at("L").at("lambda_index").get<double>();
  return {lg < ls && lg < ll, "Lambda g " + num(lg) + ", s " + num(ls) + ", L " + num(ll)};
}

Outcome robustness(const Pipeline& p) {
  const auto& r = p.theory("full").at("robustness");
  bool ok = r.at("zero_bit_exact").get<bool>();
  std::string detail = std::string("magnitude 0 bit-exact ") + (ok ? "yes" : "no");
  for (const auto& f : r.at("fits")) {
    const double slope = f.at("slope").get<double>();
    ok = ok && std::isfinite(slope) && f.at("at_most_linear").get<bool>();
    detail += "; " + f.at("kind").get<std::string>() + " slope " + num(slope) + " R2 " +
              num(f.at("r2").get<double>(), 3);
  }
  return {ok, detail};
}

Outcome fidelity(const Pipeline& p) {
  const CabDataset ds = import_dataset(p.data());
  std::size_t objects = 0;
  bool sizes = true;
  for (const auto& s : ds.scenes) {
    objects += s.scene.objects.size();
    sizes = sizes && s.scene.objects.size() >= 3 && s.scene.objects.size() <= 6;
  }
  int ambiguous = 0;
  int agree = 0;
  for (const auto& ins : ds.instructions) {
    ambiguous += ins.instruction.label == AmbiguityLabel::ambiguous;
    const std::size_t n = resolved_referents(ds, ins);
    agree += n == ins.instruction.referent_ids.size() &&
             (ins.instruction.label == AmbiguityLabel::ambiguous) == (n >= 2);
  }
  const double mean = ds.scenes.empty() ? 0.0 : static_cast<double>(objects) / ds.scenes.size();
  const bool same = dataset_digest(build_dataset(0)) == dataset_digest(p.data());
  const bool ok = ds.scenes.size() == 48 && ds.scenes_in(Split::train).size() == 32 &&
                  ds.scenes_in(Split::val).size() == 8 && ds.scenes_in(Split::test).size() == 8 &&
                  ds.instructions.size() == 2400 && ambiguous == 1200 && sizes && mean >= 4.6 &&
                  mean <= 5.0 && agree == static_cast<int>(ds.instructions.size()) && same;
  return {ok, std::to_string(ds.scenes.size()) + " scenes, " + std::to_string(ds.instructions.size()) +
                  " instructions (" + std::to_string(ambiguous) + " ambiguous), mean objects " +
                  num(mean, 3) + ", resolver agreement " + std::to_string(agree) + ", digest " +
                  (same ? "reproduced" : "DIFFERS")};
}

Outcome twins() {
  Rng rng(99);
  int exact = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = testing::random_scores(rng, rng.uniform_int(2, 30));
    exact += auroc(s) == testing::brute_auroc(s) && aupr(s) == testing::brute_aupr(s);

    std::vector<double> c;
    std::vector<bool> ok;
    for (int i = rng.uniform_int(1, 30); i > 0; --i) {
      c.push_back(rng.bernoulli(0.2) ? 0.1 * rng.uniform_int(0, 10) : rng.uniform());
      ok.push_back(rng.bernoulli(c.back()));
    }
    worst = std::max(worst, std::abs(ece(c, ok) - testing::brute_ece(c, ok, 10)));

    const auto eps = testing::random_retrieval(rng, rng.uniform_int(1, 10), rng.uniform_int(1, 8));
    for (int k = 1; k <= 3; ++k) {
      worst = std::max(worst, std::abs(recall_at_k(eps, k) - testing::brute_recall(eps, k)));
    }

    std::vector<std::pair<int, int>> xy;
    for (int i = rng.uniform_int(1, 40); i > 0; --i) {
      const int x = rng.uniform_int(0, 3);
      xy.emplace_back(x, rng.bernoulli(0.6) ? x : rng.uniform_int(0, 3));
    }
    worst = std::max(worst, std::abs(plugin_mutual_information(xy) - testing::brute_mi(xy)));
  }
  return {exact == 1000 && worst <= 1e-12,
          "AUROC/AUPR exact on " + std::to_string(exact) + "/1000, max ECE/Recall/MI error " + sci(worst)};
}

}  // namespace
}  // namespace vground

int main() {
  using namespace vground;
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;
  std::unique_ptr<Pipeline> pipeline;
  auto with = [&](Outcome (*f)(const Pipeline&)) {
    return [&pipeline, f] {
      if (!pipeline) pipeline = std::make_unique<Pipeline>();
      return f(*pipeline);
    };
  };
  criteria.emplace_back("gradient gate", gradients);
  criteria.emplace_back("contrastive bound", with(bound));
  criteria.emplace_back("verification bottleneck", with(bottleneck));
  criteria.emplace_back("entropy identities", entropy);
  criteria.emplace_back("ambiguity separation", with(separation));
  criteria.emplace_back("selective prediction", with(selective));
  criteria.emplace_back("retrieval", with(retrieval));
  criteria.emplace_back("language ignorance ordering", with(ignorance));
  criteria.emplace_back("robustness slope", with(robustness));
  criteria.emplace_back("benchmark fidelity", with(fidelity));
  criteria.emplace_back("metric oracles", twins);

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
