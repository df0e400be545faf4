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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tgcn/decoder.hpp"
#include "tgcn/encoder.hpp"
#include "tgcn/rgcn.hpp"

namespace tgcn {

enum class EncoderKind { kTgcn, kRgcn };

EncoderKind parse_encoder_kind(std::string_view name);
std::string_view encoder_kind_name(EncoderKind kind);
CoreLayout parse_core_layout(std::string_view name);
std::string_view core_layout_name(CoreLayout layout);

/// Architecture of a model; everything needed to allocate its parameters.
struct ModelConfig {
  EncoderKind encoder = EncoderKind::kTgcn;
  CoreLayout layout = CoreLayout::kDense;  // TGCN cores
  WeightScheme rgcn_scheme = WeightScheme::kCp;
  DecoderKind decoder = DecoderKind::kDistMult;
  std::int64_t num_entities = 0;
  std::int64_t num_relations = 0;  // size of the relation vocabulary actually embedded
  std::int64_t entity_dim = 100;
  std::int64_t relation_dim = 100;
  int num_layers = 2;
  std::int64_t num_bases = 100;   // n_b: CP rank (TGCN, R-GCN CP) or basis count (R-GCN basis)
  std::int64_t num_blocks = 100;  // R-GCN block scheme
  Activation hidden_activation = Activation::kRelu;
  Activation output_activation = Activation::kIdentity;

  void validate() const;
};

struct ParameterCount {
  std::int64_t nfp = 0;   // nonembedding: encoder layers + decoder
  std::int64_t efp = 0;   // entity + relation tables
  std::int64_t enfp = 0;  // encoder share of nfp
  // R-GCN only: self-loop matrices, reported apart from the regularized
  // relation weights that make up its nfp.
  std::int64_t rgcn_loop = 0;
};

/// Closed-form counts; no allocation.
ParameterCount count_parameters(const ModelConfig& config);

struct DropoutRates {
  double input = 0.0;
  double hidden1 = 0.0;
  double hidden2 = 0.0;
  double output = 0.0;
  double decoder = 0.0;

  double hidden(int layer) const { return layer == 0 ? hidden1 : hidden2; }
};

template <typename Real>
struct Model {
  ModelConfig config;
  EmbeddingTables<Real> tables;
  std::vector<EncoderLayer<Real>> layers;    // TGCN encoder
  std::vector<RgcnLayer<Real>> rgcn_layers;  // R-GCN encoder
  DecoderParams<Real> decoder;

  /// All parameters zero.
  static Model zeros(const ModelConfig& config);
  /// Zero-mean uniform initialization scaled by 1/sqrt(fan) per contracted axis.
  static Model initialized(const ModelConfig& config, Rng& rng);

  Model zeros_like() const;
  void set_zero();

  /// Calls fn(name, matrix) for every parameter array in a fixed order.
  template <typename Fn>
  void visit(Fn&& fn);
  template <typename Fn>
  void visit(Fn&& fn) const;

  std::vector<std::string> parameter_names() const;
  bool all_finite() const;
};

/// Counts the arrays the model actually holds.
template <typename Real>
ParameterCount count_parameters(const Model<Real>& model);

template <typename To, typename From>
Model<To> cast_model(const Model<From>& model);

template <typename Real>
struct EncoderTape {
  Matrix<Real> input_mask;
  Matrix<Real> output_mask;
  std::vector<LayerTape<Real>> layers;
  std::vector<RgcnTape<Real>> rgcn_layers;
};

/// Runs the encoder stack over `graph`; one output row per graph node.
/// Dropout sites: input rows, each layer's pre-activation, final output.
template <typename Real>
Matrix<Real> encode(const Model<Real>& model, const MessageGraph& graph, const DropoutRates& dropout,
                    bool training, Rng* rng, EncoderTape<Real>* tape);

/// Backpropagates dL/d(encode output) into `grads`.
template <typename Real>
void encode_backward(const Model<Real>& model, const MessageGraph& graph, const EncoderTape<Real>& tape,
                     Matrix<Real> grad_out, Model<Real>& grads);

// ---------------------------------------------------------------------------

namespace detail {

// Shared by the const and mutable visitors; Self is Model<Real> or const Model<Real>.
template <typename Self, typename Fn>
void visit_parameters(Self& model, Fn& fn) {
  fn(std::string("entity"), model.tables.entity);
  fn(std::string("relation"), model.tables.relation);
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const std::string p = "layer" + std::to_string(l) + ".";
    auto& core = model.layers[l].core;
    if (core.layout == CoreLayout::kDense) {
      fn(p + "core", core.dense.unfolded());
    } else {
      fn(p + "core.w1", core.w1);
      fn(p + "core.w2", core.w2);
      fn(p + "core.w3", core.w3);
    }
    fn(p + "loop", model.layers[l].loop_weight);
  }
  for (std::size_t l = 0; l < model.rgcn_layers.size(); ++l) {
    const std::string p = "rgcn" + std::to_string(l) + ".";
    auto& bank = model.rgcn_layers[l].bank;
    switch (bank.scheme) {
      case WeightScheme::kFull:
        fn(p + "weights", bank.weights);
        break;
      case WeightScheme::kBasis:
        fn(p + "bases", bank.bases);
        fn(p + "coefficients", bank.coefficients);
        break;
      case WeightScheme::kBlock:
        fn(p + "blocks", bank.blocks);
        break;
      case WeightScheme::kCp:
        fn(p + "u1", bank.u1);
        fn(p + "u2", bank.u2);
        fn(p + "u3", bank.u3);
        break;
    }
    fn(p + "loop", model.rgcn_layers[l].loop_weight);
  }
  if (model.decoder.kind == DecoderKind::kTucker) fn(std::string("decoder.core"), model.decoder.core.unfolded());
}

}  // namespace detail

template <typename Real>
template <typename Fn>
void Model<Real>::visit(Fn&& fn) {
  detail::visit_parameters(*this, fn);
}

template <typename Real>
template <typename Fn>
void Model<Real>::visit(Fn&& fn) const {
  detail::visit_parameters(*this, fn);
}

}  // namespace tgcn
