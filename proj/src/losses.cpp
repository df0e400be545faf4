/*
 * Copyright 2026 The TGCN Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "tgcn/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace tgcn {

using Eigen::Index;

namespace {

void check_targets(Index rows, Index cols, std::span<const Index> targets) {
  if (static_cast<Index>(targets.size()) != rows) throw ShapeError("one target per score row required");
  for (Index t : targets) {
    if (t < 0 || t >= cols) {
      std::ostringstream msg;
      msg << "target index " << t << " outside [0, " << cols << ")";
      throw ArgumentError(msg.str());
    }
  }
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

template <typename Real>
LossResult<Real> bce_1n_loss(const Matrix<Real>& scores, std::span<const Index> targets) {
  check_targets(scores.rows(), scores.cols(), targets);
  LossResult<Real> out;
  out.grad.resize(scores.rows(), scores.cols());
  if (scores.size() == 0) return out;
  const double norm = 1.0 / (static_cast<double>(scores.rows()) * static_cast<double>(scores.cols()));
  double total = 0.0;
  for (Index b = 0; b < scores.rows(); ++b) {
    for (Index c = 0; c < scores.cols(); ++c) {
      const double x = static_cast<double>(scores(b, c));
      const double y = c == targets[static_cast<std::size_t>(b)] ? 1.0 : 0.0;
      // -[y log s(x) + (1-y) log(1 - s(x))] = softplus(x) - y x
      total += softplus(x) - y * x;
      out.grad(b, c) = static_cast<Real>((sigmoid(x) - y) * norm);
    }
  }
  out.value = total * norm;
  return out;
}

template <typename Real>
LossResult<Real> nt_xent_1b_loss(const Matrix<Real>& scores, std::span<const Index> targets,
                                 double temperature) {
  if (!(temperature > 0.0)) throw ConfigError("NT-Xent temperature must be > 0");
  check_targets(scores.rows(), scores.cols(), targets);
  LossResult<Real> out;
  out.grad.resize(scores.rows(), scores.cols());
  if (scores.rows() == 0) return out;
  const double inv_tau = 1.0 / temperature;
  const double inv_batch = 1.0 / static_cast<double>(scores.rows());
  double total = 0.0;
  std::vector<double> logits(static_cast<std::size_t>(scores.cols()));
  for (Index b = 0; b < scores.rows(); ++b) {
    double max_logit = -std::numeric_limits<double>::infinity();
    for (Index c = 0; c < scores.cols(); ++c) {
      logits[static_cast<std::size_t>(c)] = static_cast<double>(scores(b, c)) * inv_tau;
      max_logit = std::max(max_logit, logits[static_cast<std::size_t>(c)]);
    }
    double sum = 0.0;
    for (double l : logits) sum += std::exp(l - max_logit);
    const double log_norm = max_logit + std::log(sum);
    const Index t = targets[static_cast<std::size_t>(b)];
    total += log_norm - logits[static_cast<std::size_t>(t)];
    for (Index c = 0; c < scores.cols(); ++c) {
      const double p = std::exp(logits[static_cast<std::size_t>(c)] - log_norm);
      out.grad(b, c) = static_cast<Real>((p - (c == t ? 1.0 : 0.0)) * inv_tau * inv_batch);
    }
  }
  out.value = total * inv_batch;
  return out;
}

template <typename Real>
double embedding_l2_penalty(const EmbeddingTables<Real>& tables, double reg_f, EmbeddingTables<Real>* grads) {
  if (reg_f == 0.0) return 0.0;
  const double sq = static_cast<double>(tables.entity.squaredNorm()) +
                    static_cast<double>(tables.relation.squaredNorm());
  if (grads != nullptr) {
    grads->entity += static_cast<Real>(2.0 * reg_f) * tables.entity;
    grads->relation += static_cast<Real>(2.0 * reg_f) * tables.relation;
  }
  return reg_f * sq;
}

#define TGCN_INSTANTIATE(Real)                                                                   \
  template LossResult<Real> bce_1n_loss(const Matrix<Real>&, std::span<const Index>);            \
  template LossResult<Real> nt_xent_1b_loss(const Matrix<Real>&, std::span<const Index>, double); \
  template double embedding_l2_penalty(const EmbeddingTables<Real>&, double, EmbeddingTables<Real>*);

TGCN_INSTANTIATE(float)
TGCN_INSTANTIATE(double)

#undef TGCN_INSTANTIATE

}  // namespace tgcn
