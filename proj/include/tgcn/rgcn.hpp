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

// Baseline relational graph convolution: messages are W_r h_u with one d x d
// matrix per relation, regularized by one of four weight-sharing schemes.

#pragma once

#include <string_view>

#include "tgcn/encoder.hpp"

namespace tgcn {

enum class WeightScheme { kFull, kBasis, kBlock, kCp };

WeightScheme parse_weight_scheme(std::string_view name);
std::string_view weight_scheme_name(WeightScheme scheme);

/// Storage per scheme (R = number of relations, d = dim):
///   Full : weights       R*d x d, rows [r*d, r*d + d) hold W_r
///   Basis: bases         n_b*d x d, coefficients R x n_b;  W_r = sum_b a_rb V_b
///   Block: blocks        R*B*s x s with s = d / B; block b of W_r at rows (r*B + b)*s
///   CP   : u1 n_b x R, u2 n_b x d, u3 n_b x d;  W_r[i,k] = sum_b u1[b,r] u2[b,i] u3[b,k]
template <typename Real>
struct RelationWeightBank {
  WeightScheme scheme = WeightScheme::kFull;
  Eigen::Index num_relations = 0;
  Eigen::Index dim = 0;
  Eigen::Index num_bases = 0;   // Basis and CP
  Eigen::Index num_blocks = 0;  // Block

  Matrix<Real> weights;
  Matrix<Real> bases;
  Matrix<Real> coefficients;
  Matrix<Real> blocks;
  Matrix<Real> u1, u2, u3;

  static RelationWeightBank make(WeightScheme scheme, Eigen::Index num_relations, Eigen::Index dim,
                                 Eigen::Index num_bases, Eigen::Index num_blocks);
  RelationWeightBank zeros_like() const;
  std::int64_t parameter_count() const;
  Eigen::Index block_size() const { return num_blocks > 0 ? dim / num_blocks : 0; }
};

/// Closed-form parameter count of a bank; matches RelationWeightBank::parameter_count.
std::int64_t weight_bank_parameter_count(WeightScheme scheme, std::int64_t num_relations,
                                         std::int64_t dim, std::int64_t num_bases,
                                         std::int64_t num_blocks);

template <typename Real>
Matrix<Real> materialize_weight(const RelationWeightBank<Real>& bank, RelationId relation);

/// Accumulates dL/d(bank) given dL/dW_r.
template <typename Real>
void materialize_weight_backward(const RelationWeightBank<Real>& bank, RelationId relation,
                                 const Matrix<Real>& grad_weight, RelationWeightBank<Real>& grad_bank);

template <typename Real>
struct RgcnLayer {
  RelationWeightBank<Real> bank;
  Matrix<Real> loop_weight;
  Activation activation = Activation::kRelu;

  RgcnLayer zeros_like() const { return {bank.zeros_like(), Matrix<Real>::Zero(loop_weight.rows(), loop_weight.cols()), activation}; }
};

template <typename Real>
struct RgcnTape {
  Matrix<Real> input;
  Matrix<Real> pre;
  Matrix<Real> mask;
  std::vector<Matrix<Real>> weights;  // W_r per relation group
};

template <typename Real>
Matrix<Real> rgcn_layer_forward(const RgcnLayer<Real>& layer, const MessageGraph& graph,
                                const Matrix<Real>& h, double dropout_rate, bool training, Rng* rng,
                                RgcnTape<Real>* tape);

template <typename Real>
Matrix<Real> rgcn_layer_backward(const RgcnLayer<Real>& layer, const MessageGraph& graph,
                                 const RgcnTape<Real>& tape, Matrix<Real> grad_out,
                                 RgcnLayer<Real>& grad_layer);

}  // namespace tgcn
