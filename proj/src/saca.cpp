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

#include "vground/saca.hpp"

#include <cmath>

#include "vground/errors.hpp"
#include "vground/rng.hpp"

namespace vground {

void SacaParams::validate() const {
  if (query.rows() != key.rows() || key.rows() != value.rows() || query.rows() == 0) {
    throw ValidationError("query/key/value widths differ");
  }
  if (key.cols() != value.cols()) {
    throw ValidationError("key and value disagree on entity dimension");
  }
  if (!query.allFinite() || !key.allFinite() || !value.allFinite()) {
    throw NumericalError("attention parameters are not finite");
  }
}

SacaParams SacaParams::random(std::uint64_t seed, int feature_dim, int entity_dim,
                              int width, double scale) {
  Rng rng = Rng::derive(seed, {0x5ACA});
  auto fill = [&](int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < c; ++j) m(i, j) = scale * rng.normal();
    }
    return m;
  };
  SacaParams p;
  p.query = fill(width, feature_dim);
  p.key = fill(width, entity_dim);
  p.value = fill(width, entity_dim);
  return p;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - m).exp().matrix();
  return e / e.sum();
}

double attention_entropy(const Eigen::VectorXd& alpha) {
  if (alpha.size() == 0) throw ValidationError("empty distribution");
  double total = 0.0;
  for (double a : alpha) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw ValidationError("distribution has a negative or non-finite entry");
    }
    total += a;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ValidationError("distribution does not sum to 1");
  }
  double h = 0.0;
  for (double a : alpha) {
    if (a > 0.0) h -= a * std::log(a);
  }
  return h;
}

SacaResult saca_forward(const Eigen::VectorXd& features, const Eigen::MatrixXd& rows,
                        std::span<const int> ids, const SacaParams& params) {
  if (rows.rows() == 0) {
    throw ValidationError("cross attention over an empty entity set");
  }
  if (static_cast<std::size_t>(rows.rows()) != ids.size()) {
    throw ValidationError("entity id count differs from row count");
  }
  if (features.size() != params.query.cols() || rows.cols() != params.key.cols()) {
    throw ValidationError("cross attention input dimensions do not match parameters");
  }
  SacaResult r;
  auto& c = r.cache;
  c.params = &params;
  c.generation = params.generation;
  c.features = features;
  c.entities = rows;
  c.query = params.query * features;
  c.keys = rows * params.key.transpose();
  c.values = rows * params.value.transpose();

  auto& goal = r.goal;
  goal.logits = c.keys * c.query / std::sqrt(static_cast<double>(params.width()));
  goal.alpha = softmax(goal.logits);
  c.alpha = goal.alpha;
  goal.g = c.values.transpose() * goal.alpha;
  goal.entropy = attention_entropy(goal.alpha);

  int best = 0;
  for (int i = 1; i < goal.alpha.size(); ++i) {
    if (goal.alpha(i) > goal.alpha(best) ||
        (goal.alpha(i) == goal.alpha(best) && ids[i] < ids[best])) {
      best = i;
    }
  }
  goal.argmax_entity = ids[best];
  return r;
}

SacaResult saca_forward(const Eigen::VectorXd& features, const EntitySet& entities,
                        const SacaParams& params) {
  const auto ids = entities.ids();
  return saca_forward(features, entities.embeddings, ids, params);
}

SacaGradients saca_backward(const Eigen::VectorXd& grad_g, const SacaCache& cache,
                            const SacaParams& params) {
  if (cache.params != &params || cache.generation != params.generation) {
    throw ValidationError("stale attention cache: parameters changed since forward");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(params.width()));
  const Eigen::VectorXd& a = cache.alpha;

  const Eigen::VectorXd d_alpha = cache.values * grad_g;
  const Eigen::VectorXd d_logits = a.cwiseProduct(d_alpha.array().matrix() -
                                                  Eigen::VectorXd::Constant(a.size(), a.dot(d_alpha)));
  const Eigen::VectorXd d_query = scale * cache.keys.transpose() * d_logits;
  const Eigen::MatrixXd d_keys = scale * d_logits * cache.query.transpose();
  const Eigen::MatrixXd d_values = a * grad_g.transpose();

  SacaGradients g;
  g.query = d_query * cache.features.transpose();
  g.key = d_keys.transpose() * cache.entities;
  g.value = d_values.transpose() * cache.entities;
  g.features = params.query.transpose() * d_query;
  g.entities = d_keys * params.key + d_values * params.value;
  return g;
}

}  // namespace vground
