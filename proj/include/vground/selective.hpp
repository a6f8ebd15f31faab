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

// Entropy-gated clarify/act decisions and risk-coverage analysis.
//
// The decision is `clarify` iff entropy > threshold (strict). An episode
// whose planner could not ground the instruction always clarifies.
// Clarifying is terminal: it succeeds on ambiguous instructions and fails
// on unambiguous ones. Acting succeeds only when the grasp lands on the
// unique referent of an unambiguous instruction.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vground/episode.hpp"
#include "vground/saca.hpp"

namespace vground {

enum class CalibrationTarget { max_total, cov_at_95 };

std::string_view to_string(CalibrationTarget t);
std::optional<CalibrationTarget> parse_calibration_target(std::string_view s);

struct SelectivePolicy {
  double threshold = 0.0;  // nats
  Split calibration_split = Split::val;
  CalibrationTarget target = CalibrationTarget::max_total;
  // Every calibration entropy was identical; the threshold carries no
  // ranking information.
  bool degenerate = false;
};

Decision decide(double entropy, const SelectivePolicy& policy);
Decision decide(const VerifiedGoal& goal, const SelectivePolicy& policy);

// Outcome of episode e under decision d.
bool decision_succeeds(const EpisodeLog& e, Decision d);

// Sweeps the distinct validation entropies (plus the clarify-everything
// option) and returns the best operating point, ties to the larger
// threshold. The threshold returned is the midpoint of the gap above the
// chosen entropy, half the smallest entropy for clarify-everything, or the
// largest entropy for act-on-everything. Throws ValidationError on an empty
// log or on logs from a split other than val.
SelectivePolicy calibrate_threshold(std::span<const EpisodeLog> val_logs,
                                    CalibrationTarget target = CalibrationTarget::max_total);

// Sets threshold, decision and succeeded on every log.
void apply_selective_policy(std::vector<EpisodeLog>& logs, const SelectivePolicy& policy);

struct RiskCoveragePoint {
  double coverage = 0.0;
  double risk = 0.0;
  double threshold = 0.0;
};

// One point per distinct entropy (act on entropy <= threshold), plus the
// zero-coverage point when the smallest entropy is positive. Sorted by
// coverage; risk at zero coverage is reported as 0.
std::vector<RiskCoveragePoint> risk_coverage_curve(std::span<const EpisodeLog> logs);

std::string risk_coverage_csv(std::span<const RiskCoveragePoint> curve);

// Risk when acting on the ceil(coverage * n) lowest-entropy episodes
// (ties by position in `logs`). coverage in (0, 1].
double risk_at_coverage(std::span<const EpisodeLog> logs, double coverage);

struct CurveComparison {
  std::vector<double> levels;
  std::vector<double> risk_a;
  std::vector<double> risk_b;
  // Fraction of levels with risk_a <= risk_b.
  double fraction_le = 0.0;
  // Lower quantile of that fraction over paired bootstrap replicates.
  double bootstrap_lower = 0.0;
  double quantile = 0.1;
  int replicates = 0;
};

// Paired comparison: a[i] and b[i] must be the same instruction. Throws
// ValidationError otherwise.
CurveComparison compare_risk_coverage(std::span<const EpisodeLog> a, std::span<const EpisodeLog> b,
                                      std::span<const double> levels, int replicates,
                                      std::uint64_t seed, double quantile = 0.1);

std::vector<double> default_coverage_levels();

}  // namespace vground
