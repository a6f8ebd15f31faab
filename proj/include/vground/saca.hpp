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

// Single-head cross attention from a sub-goal query onto entity rows.
//
//   q = W_q s,  K = E W_kᵀ,  V = E W_vᵀ
//   logits = K q / sqrt(d),  alpha = softmax(logits),  g = Vᵀ alpha
//   H = -sum alpha_i ln alpha_i   (nats, 0 ln 0 = 0)

#include <cstdint>
#include <span>
#include <vector>

#include "vground/gsm.hpp"

namespace vground {

inline constexpr int kAttentionWidth = 32;

struct SacaParams {
  Eigen::MatrixXd query;  // d x feature_dim
  Eigen::MatrixXd key;    // d x entity_dim
  Eigen::MatrixXd value;  // d x entity_dim
  // Bumped by every parameter update; caches from older generations are stale.
  std::uint64_t generation = 0;

  int width() const { return static_cast<int>(query.rows()); }
  void validate() const;
  static SacaParams random(std::uint64_t seed, int feature_dim,
                           int entity_dim = kEntityDim, int width = kAttentionWidth,
                           double scale = 0.3);
};

struct VerifiedGoal {
  Eigen::VectorXd g;
  Eigen::VectorXd alpha;
  Eigen::VectorXd logits;
  double entropy = 0.0;
  int argmax_entity = -1;  // entity id
};

struct SacaCache {
  const SacaParams* params = nullptr;
  std::uint64_t generation = 0;
  Eigen::VectorXd features;
  Eigen::MatrixXd entities;
  Eigen::VectorXd query;
  Eigen::MatrixXd keys;
  Eigen::MatrixXd values;
  Eigen::VectorXd alpha;
};

struct SacaResult {
  VerifiedGoal goal;
  SacaCache cache;
};

struct SacaGradients {
  Eigen::MatrixXd query;
  Eigen::MatrixXd key;
  Eigen::MatrixXd value;
  Eigen::VectorXd features;
  Eigen::MatrixXd entities;  // n x entity_dim
};

// Throws ValidationError on an empty entity set.
SacaResult saca_forward(const Eigen::VectorXd& features, const EntitySet& entities,
                        const SacaParams& params);
SacaResult saca_forward(const Eigen::VectorXd& features, const Eigen::MatrixXd& rows,
                        std::span<const int> ids, const SacaParams& params);

// Gradients for an upstream d(loss)/d(g). Throws ValidationError when the
// cache belongs to another parameter object or an older generation.
SacaGradients saca_backward(const Eigen::VectorXd& grad_g, const SacaCache& cache,
                            const SacaParams& params);

// Throws ValidationError unless alpha is a distribution within 1e-9.
double attention_entropy(const Eigen::VectorXd& alpha);

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

}  // namespace vground
