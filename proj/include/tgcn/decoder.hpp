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

// Triple scorers. Both are written as phi(s, r, t) = q(s, r) . h_t where the
// query vector is q = h_s .* e_r for DistMult and q = W x_1 h_s x_2 e_r for
// TuckER, so that scoring every candidate is one matrix product.

#pragma once

#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include "tgcn/tensorcore.hpp"

namespace tgcn {

enum class DecoderKind { kDistMult, kTucker };

DecoderKind parse_decoder_kind(std::string_view name);
std::string_view decoder_kind_name(DecoderKind kind);

template <typename Real>
struct DecoderParams {
  DecoderKind kind = DecoderKind::kDistMult;
  Tensor3<Real> core;  // d_e x d_r x d_e, TuckER only

  static DecoderParams distmult() { return {}; }
  static DecoderParams tucker(Eigen::Index entity_dim, Eigen::Index relation_dim);

  DecoderParams zeros_like() const;
  std::int64_t parameter_count() const { return kind == DecoderKind::kTucker ? core.size() : 0; }
};

/// Raw (pre-sigmoid) score of one triple.
template <typename Real>
Real score(const DecoderParams<Real>& params, const Vector<Real>& h_s, const Vector<Real>& e_r,
           const Vector<Real>& h_t);

/// Scores of (s, r, c) for every row c of `candidates`, in one matrix product.
template <typename Real>
Vector<Real> score_all_targets(const DecoderParams<Real>& params, const Vector<Real>& h_s,
                               const Vector<Real>& e_r, const Matrix<Real>& candidates);

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct DecoderQuery {
  Eigen::Index source = 0;  // row of the representation matrix
  RelationId relation = 0;
};

template <typename Real>
struct DecoderTape {
  Matrix<Real> mask;                 // dropout on query vectors
  std::vector<Matrix<Real>> maps;    // TuckER: M_r per distinct relation
  std::vector<RelationId> relations;
  std::vector<std::size_t> group_of;  // query -> index into relations
};

/// Query vectors for a batch, one row per query. Decoder dropout (TuckER only)
/// acts on these rows during training.
template <typename Real>
Matrix<Real> query_vectors(const DecoderParams<Real>& params, const Matrix<Real>& representations,
                           std::span<const DecoderQuery> queries, const Matrix<Real>& relation_table,
                           double dropout_rate, bool training, Rng* rng, DecoderTape<Real>* tape);

/// Adjoint of query_vectors.
template <typename Real>
void query_vectors_backward(const DecoderParams<Real>& params, const Matrix<Real>& representations,
                            std::span<const DecoderQuery> queries, const Matrix<Real>& relation_table,
                            const DecoderTape<Real>& tape, Matrix<Real> grad_queries,
                            DecoderParams<Real>& grad_params, Matrix<Real>& grad_representations,
                            Matrix<Real>& grad_relation_table);

}  // namespace tgcn
