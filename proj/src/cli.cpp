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

#include "vground/cli.hpp"

#include <chrono>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "vground/config.hpp"
#include "vground/digest.hpp"
#include "vground/errors.hpp"
#include "vground/evaluate.hpp"
#include "vground/learn.hpp"
#include "vground/theory.hpp"

namespace vground {

namespace {

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void require_dir(const fs::path& p, const char* what) {
  if (!fs::is_directory(p)) throw ValidationError(std::string(what) + " '" + p.string() + "' is not a directory");
}

void require_file(const fs::path& p, const char* what) {
  if (!fs::is_regular_file(p)) throw ValidationError(std::string(what) + " '" + p.string() + "' does not exist");
}

nlohmann::json read_json(const fs::path& p) {
  require_file(p, "file");
  try {
    return nlohmann::json::parse(read_file(p));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(p.string() + ": " + e.what());
  }
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// Column-aligned text table.
std::string table(const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> w(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    w[c] = header[c].size();
    for (const auto& r : rows) w[c] = std::max(w[c], r[c].size());
  }
  std::ostringstream s;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      s << (c ? "  " : "") << std::left << std::setw(static_cast<int>(w[c])) << r[c];
    }
    s << '\n';
  };
  line(header);
  std::vector<std::string> rule;
  for (auto x : w) rule.emplace_back(x, '-');
  line(rule);
  for (const auto& r : rows) line(r);
  return s.str();
}

struct Loaded {
  Checkpoint checkpoint;
  CabDataset dataset;
  std::string checkpoint_digest;
  std::string dataset_digest;
};

Loaded load_inputs(const fs::path& checkpoint, const fs::path& dataset_dir) {
  require_file(checkpoint, "checkpoint");
  require_dir(dataset_dir, "dataset directory");
  Loaded l;
  l.checkpoint = load_checkpoint(checkpoint);
  l.dataset = import_dataset(dataset_dir);
  l.dataset_digest = dataset_digest(dataset_dir);
  l.checkpoint_digest = file_sha256(checkpoint);
  if (l.checkpoint.dataset_digest != l.dataset_digest) {
    throw ValidationError("checkpoint was trained on dataset " + l.checkpoint.dataset_digest +
                          " but " + dataset_dir.string() + " has digest " + l.dataset_digest);
  }
  return l;
}

std::string metrics_table(const std::vector<MetricsReport>& reports) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : reports) {
    rows.push_back({r.model, fixed(r.auroc), fixed(r.aupr), fixed(r.ece), fixed(r.cov_at_95),
                    fixed(r.fpr_at_95), fixed(r.clar_at_ambig), fixed(r.unambig_sr)});
  }
  return table({"Model", "AUROC", "AUPR", "ECE", "Cov@95", "FPR@95", "Clar@Ambig", "Unambig SR"},
               rows);
}

std::string retrieval_table(const std::vector<MetricsReport>& reports) {
  std::set<int> sizes;
  for (const auto& r : reports) {
    for (const auto& [n, _] : r.recall_at_1) sizes.insert(n);
  }
  std::vector<std::string> header = {"Model"};
  for (int n : sizes) header.push_back("Recall@1 N=" + std::to_string(n));
  header.push_back("Lambda(g)");
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : reports) {
    std::vector<std::string> row = {r.model};
    for (int n : sizes) {
      std::string cell = "-";
      for (const auto& [m, v] : r.recall_at_1) {
        if (m == n) cell = fixed(v);
      }
      row.push_back(cell);
    }
    row.push_back(r.language_ignorance ? fixed(*r.language_ignorance) : "-");
    rows.push_back(std::move(row));
  }
  return table(header, rows);
}

}  // namespace

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json in = nlohmann::json::object();
  for (const auto& [k, v] : m.inputs) in[k] = v;
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [k, v] : m.outputs) out[k] = v;
  return {{"format", "vground-manifest"}, {"command", m.command},       {"run_id", m.run_id},
          {"config_hash", m.config_hash}, {"seed", m.seed},             {"inputs", in},
          {"outputs", out},               {"created_at", m.created_at}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    if (j.at("format") != "vground-manifest") throw ValidationError("not a vground manifest");
    m.command = j.at("command").get<std::string>();
    m.run_id = j.at("run_id").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [k, v] : j.at("inputs").items()) m.inputs.emplace_back(k, v.get<std::string>());
    for (const auto& [k, v] : j.at("outputs").items()) m.outputs.emplace_back(k, v.get<std::string>());
    m.created_at = j.at("created_at").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

RunManifest write_manifest(const fs::path& dir, const std::string& command, std::uint64_t seed,
                           const std::string& config_hash,
                           std::vector<std::pair<std::string, std::string>> inputs,
                           const std::vector<std::string>& files) {
  RunManifest m;
  m.command = command;
  m.seed = seed;
  m.config_hash = config_hash;
  m.inputs = std::move(inputs);
  std::string key = command + "\n" + std::to_string(seed) + "\n" + config_hash + "\n";
  for (const auto& [k, v] : m.inputs) key += k + "=" + v + "\n";
  m.run_id = sha256_hex(key).substr(0, 16);
  for (const auto& f : files) m.outputs.emplace_back(f, file_sha256(dir / f));
  m.created_at = now_utc();
  write_file(dir / kManifestFile, to_json(m).dump(2) + "\n");
  return m;
}

RunManifest cmd_gen_bench(std::uint64_t seed, const fs::path& out_dir) {
  const CabDataset ds = build_dataset(seed);
  ds.validate();
  fs::create_directories(out_dir);
  export_dataset(ds, out_dir);
  return write_manifest(out_dir, "gen-bench", seed, "", {{"dataset", dataset_digest(ds)}},
                        {std::string(kScenesFile), std::string(kInstructionsFile),
                         std::string(kSplitFile)});
}

RunManifest cmd_train(const fs::path& config_file, const fs::path& dataset_dir,
                      const fs::path& out_dir, std::optional<std::uint64_t> seed) {
  require_file(config_file, "config file");
  require_dir(dataset_dir, "dataset directory");
  KeyValues kv = read_kv_file(config_file);
  if (seed) kv["seed"] = std::to_string(*seed);
  const TrainConfig config = TrainConfig::from_kv(kv);
  const CabDataset ds = import_dataset(dataset_dir);
  TrainResult result = train(config, ds);

  Checkpoint c;
  c.config = config;
  c.config_hash = config.hash();
  c.dataset_digest = dataset_digest(dataset_dir);
  c.model = std::move(result.model);
  fs::create_directories(out_dir);
  save_checkpoint(c, out_dir / "checkpoint.json");
  write_file(out_dir / "curve.csv", curve_csv(result.curve));
  write_file(out_dir / "config.txt", config.canonical());
  return write_manifest(out_dir, "train", config.seed, c.config_hash,
                        {{"dataset", c.dataset_digest}},
                        {"checkpoint.json", "curve.csv", "config.txt"});
}

RunManifest cmd_eval(const fs::path& checkpoint, const fs::path& dataset_dir,
                     const fs::path& out_dir, const EvalCommandOptions& options) {
  const Loaded in = load_inputs(checkpoint, dataset_dir);
  EvalOptions eo;
  eo.workers = options.workers;
  eo.target = options.target;
  eo.seed = options.seed;
  const std::string name(to_string(in.checkpoint.model.ablation));
  const Evaluation ev = evaluate(in.checkpoint.model, name, in.dataset, eo);

  nlohmann::json metrics = to_json(ev.report);
  metrics["calibration"] = {{"split", "val"},
                            {"target", std::string(to_string(ev.policy.target))},
                            {"threshold", ev.policy.threshold},
                            {"degenerate", ev.policy.degenerate}};
  fs::create_directories(out_dir);
  write_file(out_dir / "metrics.json", metrics.dump(2) + "\n");
  write_file(out_dir / "metrics.txt",
             metrics_table({ev.report}) + "\n" + retrieval_table({ev.report}));
  write_file(out_dir / "risk_coverage.csv", risk_coverage_csv(ev.curve));
  write_file(out_dir / "episodes.jsonl", episodes_to_jsonl(ev.test));
  write_file(out_dir / "val_episodes.jsonl", episodes_to_jsonl(ev.val));
  return write_manifest(out_dir, "eval", options.seed, in.checkpoint.config_hash,
                        {{"checkpoint", in.checkpoint_digest}, {"dataset", in.dataset_digest}},
                        {"metrics.json", "metrics.txt", "risk_coverage.csv", "episodes.jsonl",
                         "val_episodes.jsonl"});
}

RunManifest cmd_verify_theory(const fs::path& checkpoint, const fs::path& dataset_dir,
                              const fs::path& out_dir, const TheoryCommandOptions& options) {
  const Loaded in = load_inputs(checkpoint, dataset_dir);
  const Model& model = in.checkpoint.model;
  const Split held_out[] = {Split::val, Split::test};
  const auto samples = bound_samples(model, in.dataset, held_out);

  nlohmann::json report;
  report["model"] = std::string(to_string(model.ablation));
  bool bound_ok = true;
  std::vector<std::vector<std::string>> rows;
  for (int n : {4, 8, 16}) {
    const BoundReport b = infonce_bound(samples, n, in.checkpoint.config.tau,
                                        NegativeSampling::marginal, options.batches, options.seed);
    report["infonce_bound"].push_back(to_json(b));
    bound_ok = bound_ok && b.satisfied;
    rows.push_back({std::to_string(n), fixed(b.mutual_information, 4), fixed(b.mean_loss, 4),
                    fixed(b.lower_bound, 4), fixed(b.estimator_error, 4),
                    b.satisfied ? "yes" : "NO"});
  }
  report["bound_satisfied"] = bound_ok;

  const int episodes = std::min<int>(options.bottleneck_episodes,
                                     static_cast<int>(in.dataset.instructions_in(Split::test).size()));
  const BottleneckReport bottleneck =
      verify_bottleneck(model, in.dataset, Split::test, episodes, 3, options.seed);
  report["bottleneck"] = to_json(bottleneck);
  const LanguageGridReport grid = language_grid(model, in.dataset, Split::test);
  report["language_grid"] = to_json(grid);
  RobustnessOptions ro;
  ro.seed = options.seed;
  const RobustnessReport robust = robustness_sweep(model, in.dataset, Split::test, ro);
  report["robustness"] = to_json(robust);

  std::ostringstream text;
  text << "Contrastive bound, " << samples.size() << " held-out pairs\n"
       << table({"N", "I(S;E)", "E[L]", "lnN-E[L]", "eps", "holds"}, rows) << "\n"
       << "Bottleneck replays: " << bottleneck.identical << "/" << bottleneck.replays
       << " identical over " << bottleneck.episodes << " episodes\n"
       << "Decomposition gap: " << grid.decomposition.gap << " nats\n"
       << "Lambda g/s/L: " << fixed(grid.goal.lambda_index) << " / "
       << fixed(grid.subgoal.lambda_index) << " / " << fixed(grid.instruction.lambda_index) << "\n";
  std::vector<std::vector<std::string>> fit_rows;
  for (const auto& f : robust.fits) {
    fit_rows.push_back({std::string(to_string(f.kind)), fixed(f.slope, 4), fixed(f.intercept, 4),
                        fixed(f.r2, 3), f.at_most_linear ? "yes" : "NO"});
  }
  text << "\nRobustness (magnitude 0 bit-exact: " << (robust.zero_bit_exact ? "yes" : "NO")
       << ")\n"
       << table({"kind", "slope", "intercept", "R2", "linear"}, fit_rows);

  fs::create_directories(out_dir);
  write_file(out_dir / "theory.json", report.dump(2) + "\n");
  write_file(out_dir / "theory.txt", text.str());
  const RunManifest m = write_manifest(
      out_dir, "verify-theory", options.seed, in.checkpoint.config_hash,
      {{"checkpoint", in.checkpoint_digest}, {"dataset", in.dataset_digest}},
      {"theory.json", "theory.txt"});
  if (!bound_ok) throw NumericalError(nlohmann::json{{"bound_satisfied", false},
                                                     {"infonce_bound", report["infonce_bound"]}}
                                          .dump());
  return m;
}

RunManifest cmd_report(const std::vector<fs::path>& run_dirs, const fs::path& out_dir,
                       std::uint64_t seed) {
  if (run_dirs.empty()) throw ValidationError("report needs at least one run directory");
  std::vector<MetricsReport> reports;
  std::map<std::string, std::vector<EpisodeLog>> logs;
  std::ostringstream rc;
  rc << "model,threshold,coverage,risk\n";
  std::ostringstream recall;
  recall << "model,N,recall_at_1\n";
  std::vector<std::pair<std::string, std::string>> inputs;
  for (const auto& dir : run_dirs) {
    require_dir(dir, "run directory");
    const auto manifest = manifest_from_json(read_json(dir / kManifestFile));
    if (manifest.command != "eval") {
      throw ValidationError(dir.string() + " is not an eval run");
    }
    for (const auto& [file, digest] : manifest.outputs) {
      if (file_sha256(dir / file) != digest) {
        throw ValidationError(dir.string() + "/" + file + " does not match its manifest digest");
      }
    }
    const MetricsReport r = metrics_report_from_json(read_json(dir / "metrics.json"));
    auto episodes = episodes_from_jsonl(read_file(dir / "episodes.jsonl"));
    for (const auto& e : episodes) {
      if (e.split != Split::test) {
        throw ValidationError(dir.string() + ": episode " + std::to_string(e.episode_id) +
                              " is not from the test split");
      }
    }
    inputs.emplace_back(r.model, manifest.run_id);
    std::istringstream lines(read_file(dir / "risk_coverage.csv"));
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
      if (!line.empty()) rc << r.model << ',' << line << '\n';
    }
    for (const auto& [n, v] : r.recall_at_1) recall << r.model << ',' << n << ',' << v << '\n';
    logs[r.model] = std::move(episodes);
    reports.push_back(r);
  }

  nlohmann::json out;
  out["table3"] = nlohmann::json::array();
  out["table4"] = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j = to_json(r);
    out["table3"].push_back({{"Model", r.model},
                             {"AUROC", r.auroc},
                             {"AUPR", r.aupr},
                             {"ECE", r.ece},
                             {"Cov@95", r.cov_at_95},
                             {"FPR@95", r.fpr_at_95},
                             {"Clar@Ambig", r.clar_at_ambig},
                             {"Unambig SR", r.unambig_sr}});
    out["table4"].push_back({{"Model", r.model}, {"Recall@1", j["Recall@1"]},
                             {"language_ignorance", j["language_ignorance"]}});
  }
  std::string text = metrics_table(reports) + "\n" + retrieval_table(reports);
  if (logs.count("full") && logs.count("no_gac")) {
    const auto levels = default_coverage_levels();
    const CurveComparison cmp =
        compare_risk_coverage(logs["full"], logs["no_gac"], levels, 1000, seed, 0.1);
    out["risk_coverage_full_vs_no_gac"] = {{"levels", cmp.levels},
                                           {"risk_full", cmp.risk_a},
                                           {"risk_no_gac", cmp.risk_b},
                                           {"fraction_le", cmp.fraction_le},
                                           {"bootstrap_p10", cmp.bootstrap_lower}};
    text += "\nfull <= no_gac at " + fixed(100.0 * cmp.fraction_le, 1) +
            "% of coverage levels (bootstrap 10th percentile " + fixed(100.0 * cmp.bootstrap_lower, 1) +
            "%)\n";
  }
  fs::create_directories(out_dir);
  write_file(out_dir / "report.json", out.dump(2) + "\n");
  write_file(out_dir / "report.txt", text);
  write_file(out_dir / "risk_coverage_all.csv", rc.str());
  write_file(out_dir / "recall.csv", recall.str());
  return write_manifest(out_dir, "report", seed, "", inputs,
                        {"report.json", "report.txt", "risk_coverage_all.csv", "recall.csv"});
}

int run_guarded(const std::function<void()>& body, std::ostream& err) {
  auto emit = [&](const char* kind, const std::string& message, int code) {
    nlohmann::json j = {{"error", kind}, {"exit_code", code}};
    // Numerical failures carry a JSON diagnostic; embed it as an object.
    const auto parsed = nlohmann::json::parse(message, nullptr, false);
    if (!parsed.is_discarded() && parsed.is_object()) {
      j["detail"] = parsed;
    } else {
      j["message"] = message;
    }
    err << j.dump() << std::endl;
    return code;
  };
  try {
    body();
    return 0;
  } catch (const ParseError& e) {
    return emit("parse_error", e.what(), 2);
  } catch (const ValidationError& e) {
    return emit("validation_error", e.what(), 2);
  } catch (const NumericalError& e) {
    return emit("numerical_error", e.what(), 3);
  } catch (const GenerationError& e) {
    return emit("generation_error", e.what(), 1);
  } catch (const fs::filesystem_error& e) {
    return emit("validation_error", e.what(), 2);
  } catch (const std::exception& e) {
    return emit("internal_error", e.what(), 1);
  }
}

}  // namespace vground
