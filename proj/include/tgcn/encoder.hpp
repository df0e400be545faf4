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

// Tucker graph-convolution layer:
//
//   h'_v = act( sum_r sum_{u in N_v^r} (1/c_{v,r}) f(e_r, h_u) + W_0 h_v )
//
// with f from tensorcore. Forward passes optionally record a tape that the
// matching backward pass consumes.

#pragma once

#include <string_view>
#include <vector>

#include "tgcn/message_graph.hpp"
#include "tgcn/tensorcore.hpp"

namespace tgcn {

enum class Activation { kIdentity, kRelu };

Activation parse_activation(std::string_view name);
std::string_view activation_name(Activation activation);

template <typename Real>
void apply_activation(Activation activation, Matrix<Real>& x);

/// Multiplies `grad` in place by act'(pre).
template <typename Real>
void activation_backward(Activation activation, const Matrix<Real>& pre, Matrix<Real>& grad);

/// Inverted dropout. With training off or rate 0 this is the identity and `mask`
/// is left empty.
template <typename Real>
void dropout_forward(Matrix<Real>& x, double rate, bool training, Rng* rng, Matrix<Real>* mask);

template <typename Real>
void dropout_backward(const Matrix<Real>& mask, Matrix<Real>& grad);

template <typename Real>
struct EmbeddingTables {
  Matrix<Real> entity;    // |V| x d_e
  Matrix<Real> relation;  // |R_aug| x d_r
};

template <typename Real>
struct EncoderLayer {
  CoreTensor<Real> core;     // dims (d_e, d_r, d_e)
  Matrix<Real> loop_weight;  // W_0, d_e x d_e
  Activation activation = Activation::kRelu;

  EncoderLayer zeros_like() const { return {core.zeros_like(), Matrix<Real>::Zero(loop_weight.rows(), loop_weight.cols()), activation}; }
  std::int64_t parameter_count() const { return core.parameter_count() + loop_weight.size(); }
};

template <typename Real>
struct LayerTape {
  Matrix<Real> input;
  Matrix<Real> pre;   // pre-activation after dropout
  Matrix<Real> mask;  // dropout mask, empty when inactive
  // Dense layout: M_r per relation group of the graph.
  std::vector<Matrix<Real>> relation_maps;
  // CP layout: P = H W2^T, Z = relation-mixed sums, A.row(g) = (W1 e_r)^T.
  Matrix<Real> projected;
  Matrix<Real> mixed;
  Matrix<Real> relation_mix;
};

/// One propagation step over `graph`. `h` has one row per graph node.
template <typename Real>
Matrix<Real> layer_forward(const EncoderLayer<Real>& layer, const MessageGraph& graph,
                           const Matrix<Real>& h, const Matrix<Real>& relation_table,
                           double dropout_rate, bool training, Rng* rng, LayerTape<Real>* tape);

/// Returns dL/dh and accumulates parameter gradients into `grad_layer` and
/// `grad_relation_table`.
template <typename Real>
Matrix<Real> layer_backward(const EncoderLayer<Real>& layer, const MessageGraph& graph,
                            const Matrix<Real>& relation_table, const LayerTape<Real>& tape,
                            Matrix<Real> grad_out, EncoderLayer<Real>& grad_layer,
                            Matrix<Real>& grad_relation_table);

}  // namespace tgcn
