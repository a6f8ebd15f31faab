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

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vground/types.hpp"

namespace vground {

inline constexpr double kDefaultTemperature = 0.07;
inline constexpr double kDefaultGacWeight = 0.1;

// Throws ValidationError if either vector has zero norm.
double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct GacResult {
  double loss = 0.0;
  Eigen::VectorXd grad_query;
  Eigen::VectorXd grad_positive;
  std::vector<Eigen::VectorXd> grad_negatives;
  // Softmax over the N candidates, positive first.
  Eigen::VectorXd probabilities;
};

// -log softmax of cos(q, k+)/tau against the positive and all negatives.
GacResult gac_loss(const Eigen::VectorXd& query, const Eigen::VectorXd& positive,
                   std::span<const Eigen::VectorXd> negatives, double tau);

struct ActionLossResult {
  double loss = 0.0;
  Eigen::VectorXd grad;  // d/d(predicted)
};

// Squared L2 distance; throws ValidationError on a dimension mismatch.
ActionLossResult action_loss(const Eigen::VectorXd& predicted, const Eigen::VectorXd& expert);

Eigen::VectorXd action_to_vector(const ActionVector& a);

}  // namespace vground
