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

#include "vground/losses.hpp"

#include <cmath>

#include "vground/errors.hpp"

namespace vground {

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw ValidationError("cosine similarity of a zero-norm vector");
  }
  return a.dot(b) / (na * nb);
}

GacResult gac_loss(const Eigen::VectorXd& query, const Eigen::VectorXd& positive,
                   std::span<const Eigen::VectorXd> negatives, double tau) {
  if (!(tau > 0.0)) throw ValidationError("temperature must be positive");
  if (negatives.empty()) throw ValidationError("contrastive loss needs a negative");

  const std::size_t n = negatives.size() + 1;
  auto candidate = [&](std::size_t i) -> const Eigen::VectorXd& {
    return i == 0 ? positive : negatives[i - 1];
  };

  const double qn = query.norm();
  if (!(qn > 0.0)) throw ValidationError("cosine similarity of a zero-norm vector");
  const Eigen::VectorXd qhat = query / qn;

  Eigen::VectorXd cos(n), knorm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& k = candidate(i);
    if (k.size() != query.size()) throw ValidationError("candidate dimension mismatch");
    knorm(i) = k.norm();
    if (!(knorm(i) > 0.0)) throw ValidationError("cosine similarity of a zero-norm vector");
    cos(i) = qhat.dot(k) / knorm(i);
  }
  const Eigen::VectorXd logits = cos / tau;
  const double m = logits.maxCoeff();
  const Eigen::VectorXd ex = (logits.array() - m).exp().matrix();
  const double z = ex.sum();

  GacResult r;
  r.probabilities = ex / z;
  r.loss = -(logits(0) - m - std::log(z));

  r.grad_query = Eigen::VectorXd::Zero(query.size());
  r.grad_negatives.resize(negatives.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& k = candidate(i);
    const double dcos = (r.probabilities(i) - (i == 0 ? 1.0 : 0.0)) / tau;
    const Eigen::VectorXd khat = k / knorm(i);
    r.grad_query += dcos * (khat - cos(i) * qhat) / qn;
    Eigen::VectorXd dk = dcos * (qhat - cos(i) * khat) / knorm(i);
    if (i == 0) {
      r.grad_positive = std::move(dk);
    } else {
      r.grad_negatives[i - 1] = std::move(dk);
    }
  }
  return r;
}

ActionLossResult action_loss(const Eigen::VectorXd& predicted, const Eigen::VectorXd& expert) {
  if (predicted.size() != expert.size()) {
    throw ValidationError("action dimension mismatch: " + std::to_string(predicted.size()) +
                          " vs " + std::to_string(expert.size()));
  }
  const Eigen::VectorXd diff = predicted - expert;
  return {diff.squaredNorm(), 2.0 * diff};
}

Eigen::VectorXd action_to_vector(const ActionVector& a) {
  Eigen::VectorXd v(4);
  v << a.delta, a.grip;
  return v;
}

}  // namespace vground
