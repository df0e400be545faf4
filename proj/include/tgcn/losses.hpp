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

#pragma once

#include <span>

#include "tgcn/encoder.hpp"

namespace tgcn {

template <typename Real>
struct LossResult {
  double value = 0.0;
  Matrix<Real> grad;  // dL/dscores, same shape as the score matrix
};

/// 1-N binary cross-entropy. Row b scores (s_b, r_b, t') for every column t';
/// the label is one-hot at targets[b]. Each row is averaged over its columns and
/// the batch is averaged over rows. Evaluated through softplus, so saturated
/// scores stay finite.
template <typename Real>
LossResult<Real> bce_1n_loss(const Matrix<Real>& scores, std::span<const Eigen::Index> targets);

/// NT-Xent over the batch's unique entities: softmax cross-entropy of scores / tau
/// against column targets[b], averaged over rows.
template <typename Real>
LossResult<Real> nt_xent_1b_loss(const Matrix<Real>& scores, std::span<const Eigen::Index> targets,
                                 double temperature);

/// reg_f * (||entity||^2 + ||relation||^2); adds 2 * reg_f * table into the gradients.
template <typename Real>
double embedding_l2_penalty(const EmbeddingTables<Real>& tables, double reg_f,
                            EmbeddingTables<Real>* grads = nullptr);

}  // namespace tgcn
