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

#include "vground/selective.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "vground/errors.hpp"
#include "vground/rng.hpp"

namespace vground {

std::string_view to_string(CalibrationTarget t) {
  return t == CalibrationTarget::max_total ? "max_total" : "cov_at_95";
}

std::optional<CalibrationTarget> parse_calibration_target(std::string_view s) {
  if (s == "max_total") return CalibrationTarget::max_total;
  if (s == "cov_at_95") return CalibrationTarget::cov_at_95;
  return std::nullopt;
}

Decision decide(double entropy, const SelectivePolicy& policy) {
  return entropy > policy.threshold ? Decision::clarify : Decision::act;
}

Decision decide(const VerifiedGoal& goal, const SelectivePolicy& policy) {
  return decide(goal.entropy, policy);
}

bool decision_succeeds(const EpisodeLog& e, Decision d) {
  return d == Decision::clarify ? e.ambiguous() : e.act_success;
}

namespace {

Decision effective(const EpisodeLog& e, double threshold) {
  if (e.grounding_failed) return Decision::clarify;
  return e.entropy > threshold ? Decision::clarify : Decision::act;
}

struct Score {
  double primary = 0.0;
  bool feasible = true;
};

Score score(std::span<const EpisodeLog> logs, double threshold, CalibrationTarget target) {
  std::size_t success = 0;
  std::size_t acted = 0;
  std::size_t acted_ok = 0;
  for (const auto& e : logs) {
    const Decision d = effective(e, threshold);
    if (decision_succeeds(e, d)) ++success;
    if (d == Decision::act) {
      ++acted;
      if (e.act_success) ++acted_ok;
    }
  }
  if (target == CalibrationTarget::max_total) return {static_cast<double>(success), true};
  const bool ok = acted == 0 || static_cast<double>(acted_ok) >= 0.95 * static_cast<double>(acted);
  return {static_cast<double>(acted) / static_cast<double>(logs.size()), ok};
}

}  // namespace

SelectivePolicy calibrate_threshold(std::span<const EpisodeLog> val_logs, CalibrationTarget target) {
  if (val_logs.empty()) throw ValidationError("threshold calibration needs validation episodes");
  for (const auto& e : val_logs) {
    if (e.split != Split::val) {
      throw ValidationError("threshold calibration must use validation episodes only");
    }
  }
  std::vector<double> v;
  for (const auto& e : val_logs) v.push_back(e.entropy);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());

  // Candidate thresholds in increasing order.
  std::vector<double> candidates;
  if (v.front() > 0.0) candidates.push_back(v.front() / 2.0);
  for (std::size_t k = 0; k + 1 < v.size(); ++k) candidates.push_back((v[k] + v[k + 1]) / 2.0);
  candidates.push_back(v.back());

  SelectivePolicy best;
  best.target = target;
  best.degenerate = v.size() == 1;
  bool have = false;
  double best_score = 0.0;
  for (double t : candidates) {
    const Score s = score(val_logs, t, target);
    if (!s.feasible) continue;
    if (!have || s.primary >= best_score) {
      have = true;
      best_score = s.primary;
      best.threshold = t;
    }
  }
  if (!have) {
    // Nothing reaches the accuracy target: clarify as much as possible.
    best.threshold = candidates.front();
    best.degenerate = true;
  }
  return best;
}

void apply_selective_policy(std::vector<EpisodeLog>& logs, const SelectivePolicy& policy) {
  for (auto& e : logs) {
    e.threshold = policy.threshold;
    e.decision = effective(e, policy.threshold);
    e.succeeded = decision_succeeds(e, e.decision);
  }
}

std::vector<RiskCoveragePoint> risk_coverage_curve(std::span<const EpisodeLog> logs) {
  std::vector<RiskCoveragePoint> out;
  if (logs.empty()) return out;
  std::vector<double> v;
  for (const auto& e : logs) v.push_back(e.entropy);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  const double n = static_cast<double>(logs.size());
  auto point = [&](double t) {
    std::size_t acted = 0;
    std::size_t failed = 0;
    for (const auto& e : logs) {
      if (effective(e, t) == Decision::act) {
        ++acted;
        if (!e.act_success) ++failed;
      }
    }
    RiskCoveragePoint p;
    p.threshold = t;
    p.coverage = static_cast<double>(acted) / n;
    p.risk = acted == 0 ? 0.0 : static_cast<double>(failed) / static_cast<double>(acted);
    return p;
  };
  if (v.front() > 0.0) out.push_back(point(v.front() / 2.0));
  for (double t : v) out.push_back(point(t));
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.coverage < b.coverage; });
  return out;
}

std::string risk_coverage_csv(std::span<const RiskCoveragePoint> curve) {
  std::ostringstream s;
  s << std::setprecision(17) << "threshold,coverage,risk\n";
  for (const auto& p : curve) s << p.threshold << ',' << p.coverage << ',' << p.risk << '\n';
  return s.str();
}

namespace {

std::vector<double> risks_at(std::span<const EpisodeLog> logs, std::span<const std::size_t> idx,
                             std::span<const double> levels) {
  std::vector<std::size_t> order(idx.begin(), idx.end());
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return logs[a].entropy < logs[b].entropy;
  });
  std::vector<std::size_t> failed(order.size() + 1, 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    failed[i + 1] = failed[i] + (logs[order[i]].act_success ? 0 : 1);
  }
  std::vector<double> out;
  for (double c : levels) {
    const auto k = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(c * static_cast<double>(order.size()) - 1e-9)));
    out.push_back(static_cast<double>(failed[k]) / static_cast<double>(k));
  }
  return out;
}

}  // namespace

double risk_at_coverage(std::span<const EpisodeLog> logs, double coverage) {
  if (logs.empty()) throw ValidationError("risk at coverage of an empty log");
  if (!(coverage > 0.0 && coverage <= 1.0)) throw ValidationError("coverage must lie in (0, 1]");
  std::vector<std::size_t> idx(logs.size());
  std::iota(idx.begin(), idx.end(), 0);
  const double level[] = {coverage};
  return risks_at(logs, idx, level).front();
}

std::vector<double> default_coverage_levels() {
  std::vector<double> l;
  for (int i = 1; i <= 20; ++i) l.push_back(0.05 * i);
  return l;
}

CurveComparison compare_risk_coverage(std::span<const EpisodeLog> a, std::span<const EpisodeLog> b,
                                      std::span<const double> levels, int replicates,
                                      std::uint64_t seed, double quantile) {
  if (a.size() != b.size() || a.empty()) {
    throw ValidationError("paired risk-coverage comparison needs equally sized logs");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].instruction_id != b[i].instruction_id) {
      throw ValidationError("paired risk-coverage comparison: logs are not aligned");
    }
  }
  for (double c : levels) {
    if (!(c > 0.0 && c <= 1.0)) throw ValidationError("coverage levels must lie in (0, 1]");
  }
  CurveComparison out;
  out.levels.assign(levels.begin(), levels.end());
  out.quantile = quantile;
  out.replicates = replicates;

  auto fraction = [&](std::span<const std::size_t> idx, std::vector<double>* ra,
                      std::vector<double>* rb) {
    const auto x = risks_at(a, idx, levels);
    const auto y = risks_at(b, idx, levels);
    int le = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] <= y[i]) ++le;
    }
    if (ra) *ra = x;
    if (rb) *rb = y;
    return static_cast<double>(le) / static_cast<double>(levels.size());
  };

  std::vector<std::size_t> idx(a.size());
  std::iota(idx.begin(), idx.end(), 0);
  out.fraction_le = fraction(idx, &out.risk_a, &out.risk_b);

  if (replicates > 0) {
    Rng rng = Rng::derive(seed, {0xB007});
    std::vector<double> fr;
    fr.reserve(static_cast<std::size_t>(replicates));
    for (int r = 0; r < replicates; ++r) {
      for (auto& i : idx) {
        i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(a.size()) - 1));
      }
      fr.push_back(fraction(idx, nullptr, nullptr));
    }
    std::sort(fr.begin(), fr.end());
    const auto q = static_cast<std::size_t>(std::floor(quantile * (replicates - 1)));
    out.bootstrap_lower = fr[q];
  } else {
    out.bootstrap_lower = out.fraction_le;
  }
  return out;
}

}  // namespace vground
