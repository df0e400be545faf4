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

#include "tgcn/model.hpp"

#include <cmath>
#include <sstream>

namespace tgcn {

using Eigen::Index;

EncoderKind parse_encoder_kind(std::string_view name) {
  if (name == "tgcn") return EncoderKind::kTgcn;
  if (name == "rgcn") return EncoderKind::kRgcn;
  throw ArgumentError("unknown encoder '" + std::string(name) + "' (expected tgcn or rgcn)");
}

std::string_view encoder_kind_name(EncoderKind kind) { return kind == EncoderKind::kRgcn ? "rgcn" : "tgcn"; }

CoreLayout parse_core_layout(std::string_view name) {
  if (name == "dense") return CoreLayout::kDense;
  if (name == "cp") return CoreLayout::kCp;
  throw ArgumentError("unknown core layout '" + std::string(name) + "' (expected dense or cp)");
}

std::string_view core_layout_name(CoreLayout layout) { return layout == CoreLayout::kCp ? "cp" : "dense"; }

void ModelConfig::validate() const {
  std::ostringstream err;
  if (num_entities < 1) err << "num_entities must be >= 1; ";
  if (num_relations < 1) err << "num_relations must be >= 1; ";
  if (entity_dim < 1 || relation_dim < 1) err << "dimensions must be >= 1; ";
  if (num_layers < 0) err << "layers must be >= 0; ";
  if (decoder == DecoderKind::kDistMult && entity_dim != relation_dim) err << "DistMult needs d_e == d_r; ";
  const bool needs_bases = (encoder == EncoderKind::kTgcn && layout == CoreLayout::kCp) ||
                           (encoder == EncoderKind::kRgcn &&
                            (rgcn_scheme == WeightScheme::kCp || rgcn_scheme == WeightScheme::kBasis));
  if (needs_bases && num_bases < 1) err << "n_b must be >= 1; ";
  if (encoder == EncoderKind::kRgcn && rgcn_scheme == WeightScheme::kBlock &&
      (num_blocks < 1 || entity_dim % num_blocks != 0)) {
    err << "R-GCN blocks must divide the dimension; ";
  }
  if (!err.str().empty()) throw ConfigError("invalid model configuration: " + err.str());
}

ParameterCount count_parameters(const ModelConfig& c) {
  ParameterCount count;
  count.efp = c.num_entities * c.entity_dim + c.num_relations * c.relation_dim;
  for (int l = 0; l < c.num_layers; ++l) {
    if (c.encoder == EncoderKind::kTgcn) {
      count.enfp += c.layout == CoreLayout::kDense
                        ? c.entity_dim * c.relation_dim * c.entity_dim
                        : c.num_bases * (c.entity_dim + c.relation_dim + c.entity_dim);
      count.enfp += c.entity_dim * c.entity_dim;
    } else {
      count.enfp += weight_bank_parameter_count(c.rgcn_scheme, c.num_relations, c.entity_dim, c.num_bases,
                                                c.num_blocks);
      count.rgcn_loop += c.entity_dim * c.entity_dim;
    }
  }
  count.nfp = count.enfp;
  if (c.decoder == DecoderKind::kTucker) count.nfp += c.entity_dim * c.relation_dim * c.entity_dim;
  return count;
}

namespace {

template <typename Real>
void fill_uniform(Matrix<Real>& m, double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<Real>(dist(rng));
}

double inv_sqrt(std::int64_t n) { return 1.0 / std::sqrt(static_cast<double>(n)); }

}  // namespace

template <typename Real>
Model<Real> Model<Real>::zeros(const ModelConfig& config) {
  config.validate();
  Model m;
  m.config = config;
  m.tables.entity = Matrix<Real>::Zero(config.num_entities, config.entity_dim);
  m.tables.relation = Matrix<Real>::Zero(config.num_relations, config.relation_dim);
  const CoreDims dims{config.entity_dim, config.relation_dim, config.entity_dim};
  for (int l = 0; l < config.num_layers; ++l) {
    const Activation act = l + 1 == config.num_layers ? config.output_activation : config.hidden_activation;
    const Matrix<Real> loop = Matrix<Real>::Zero(config.entity_dim, config.entity_dim);
    if (config.encoder == EncoderKind::kTgcn) {
      auto core = config.layout == CoreLayout::kDense ? CoreTensor<Real>::make_dense(dims)
                                                      : CoreTensor<Real>::make_cp(dims, config.num_bases);
      m.layers.push_back({std::move(core), loop, act});
    } else {
      auto bank = RelationWeightBank<Real>::make(config.rgcn_scheme, config.num_relations, config.entity_dim,
                                                 config.num_bases, config.num_blocks);
      m.rgcn_layers.push_back({std::move(bank), loop, act});
    }
  }
  m.decoder = config.decoder == DecoderKind::kTucker
                  ? DecoderParams<Real>::tucker(config.entity_dim, config.relation_dim)
                  : DecoderParams<Real>::distmult();
  return m;
}

template <typename Real>
Model<Real> Model<Real>::initialized(const ModelConfig& config, Rng& rng) {
  Model m = zeros(config);
  const auto de = config.entity_dim, dr = config.relation_dim;
  fill_uniform(m.tables.entity, inv_sqrt(de), rng);
  fill_uniform(m.tables.relation, inv_sqrt(dr), rng);
  for (auto& layer : m.layers) {
    if (layer.core.layout == CoreLayout::kDense) {
      fill_uniform(layer.core.dense.unfolded(), inv_sqrt(de) * inv_sqrt(dr), rng);
    } else {
      fill_uniform(layer.core.w1, inv_sqrt(dr), rng);
      fill_uniform(layer.core.w2, inv_sqrt(de), rng);
      fill_uniform(layer.core.w3, inv_sqrt(layer.core.rank), rng);
    }
    fill_uniform(layer.loop_weight, inv_sqrt(de), rng);
  }
  for (auto& layer : m.rgcn_layers) {
    auto& bank = layer.bank;
    switch (bank.scheme) {
      case WeightScheme::kFull:
        fill_uniform(bank.weights, inv_sqrt(de), rng);
        break;
      case WeightScheme::kBasis:
        fill_uniform(bank.bases, inv_sqrt(de), rng);
        fill_uniform(bank.coefficients, inv_sqrt(bank.num_bases), rng);
        break;
      case WeightScheme::kBlock:
        fill_uniform(bank.blocks, inv_sqrt(bank.block_size()), rng);
        break;
      case WeightScheme::kCp:
        fill_uniform(bank.u1, 1.0, rng);
        fill_uniform(bank.u2, inv_sqrt(de), rng);
        fill_uniform(bank.u3, inv_sqrt(bank.num_bases), rng);
        break;
    }
    fill_uniform(layer.loop_weight, inv_sqrt(de), rng);
  }
  if (m.decoder.kind == DecoderKind::kTucker) {
    fill_uniform(m.decoder.core.unfolded(), inv_sqrt(de) * inv_sqrt(dr), rng);
  }
  return m;
}

template <typename Real>
Model<Real> Model<Real>::zeros_like() const {
  return zeros(config);
}

template <typename Real>
void Model<Real>::set_zero() {
  visit([](const std::string&, Matrix<Real>& m) { m.setZero(); });
}

template <typename Real>
std::vector<std::string> Model<Real>::parameter_names() const {
  std::vector<std::string> names;
  visit([&names](const std::string& name, const Matrix<Real>&) { names.push_back(name); });
  return names;
}

template <typename Real>
bool Model<Real>::all_finite() const {
  bool finite = true;
  visit([&finite](const std::string&, const Matrix<Real>& m) { finite = finite && m.allFinite(); });
  return finite;
}

template <typename Real>
ParameterCount count_parameters(const Model<Real>& model) {
  ParameterCount count;
  count.efp = model.tables.entity.size() + model.tables.relation.size();
  for (const auto& layer : model.layers) count.enfp += layer.parameter_count();
  for (const auto& layer : model.rgcn_layers) {
    count.enfp += layer.bank.parameter_count();
    count.rgcn_loop += layer.loop_weight.size();
  }
  count.nfp = count.enfp + model.decoder.parameter_count();
  return count;
}

template <typename To, typename From>
Model<To> cast_model(const Model<From>& model) {
  Model<To> out = Model<To>::zeros(model.config);
  std::vector<const Matrix<From>*> sources;
  model.visit([&sources](const std::string&, const Matrix<From>& m) { sources.push_back(&m); });
  std::size_t i = 0;
  out.visit([&](const std::string&, Matrix<To>& m) { m = sources[i++]->template cast<To>(); });
  return out;
}

template <typename Real>
Matrix<Real> encode(const Model<Real>& model, const MessageGraph& graph, const DropoutRates& dropout,
                    bool training, Rng* rng, EncoderTape<Real>* tape) {
  const Index n = graph.num_nodes();
  Matrix<Real> h(n, model.config.entity_dim);
  for (Index i = 0; i < n; ++i) h.row(i) = model.tables.entity.row(graph.nodes()[static_cast<std::size_t>(i)]);

  Matrix<Real> mask;
  dropout_forward(h, dropout.input, training, rng, &mask);
  if (tape != nullptr) {
    tape->input_mask = std::move(mask);
    tape->layers.assign(model.layers.size(), {});
    tape->rgcn_layers.assign(model.rgcn_layers.size(), {});
  }
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    h = layer_forward(model.layers[l], graph, h, model.tables.relation, dropout.hidden(static_cast<int>(l)),
                      training, rng, tape != nullptr ? &tape->layers[l] : nullptr);
  }
  for (std::size_t l = 0; l < model.rgcn_layers.size(); ++l) {
    h = rgcn_layer_forward(model.rgcn_layers[l], graph, h, dropout.hidden(static_cast<int>(l)), training,
                           rng, tape != nullptr ? &tape->rgcn_layers[l] : nullptr);
  }
  dropout_forward(h, dropout.output, training, rng, &mask);
  if (tape != nullptr) tape->output_mask = std::move(mask);
  return h;
}

template <typename Real>
void encode_backward(const Model<Real>& model, const MessageGraph& graph, const EncoderTape<Real>& tape,
                     Matrix<Real> grad_out, Model<Real>& grads) {
  dropout_backward(tape.output_mask, grad_out);
  for (std::size_t l = model.rgcn_layers.size(); l-- > 0;) {
    grad_out = rgcn_layer_backward(model.rgcn_layers[l], graph, tape.rgcn_layers[l], std::move(grad_out),
                                   grads.rgcn_layers[l]);
  }
  for (std::size_t l = model.layers.size(); l-- > 0;) {
    grad_out = layer_backward(model.layers[l], graph, model.tables.relation, tape.layers[l], std::move(grad_out),
                              grads.layers[l], grads.tables.relation);
  }
  dropout_backward(tape.input_mask, grad_out);
  for (Index i = 0; i < graph.num_nodes(); ++i) {
    grads.tables.entity.row(graph.nodes()[static_cast<std::size_t>(i)]) += grad_out.row(i);
  }
}

#define TGCN_INSTANTIATE(Real)                                                                      \
  template struct Model<Real>;                                                                      \
  template ParameterCount count_parameters(const Model<Real>&);                                     \
  template Matrix<Real> encode(const Model<Real>&, const MessageGraph&, const DropoutRates&, bool,   \
                               Rng*, EncoderTape<Real>*);                                           \
  template void encode_backward(const Model<Real>&, const MessageGraph&, const EncoderTape<Real>&,  \
                                Matrix<Real>, Model<Real>&);

TGCN_INSTANTIATE(float)
TGCN_INSTANTIATE(double)

#undef TGCN_INSTANTIATE

template Model<double> cast_model(const Model<float>&);
template Model<float> cast_model(const Model<double>&);
template Model<float> cast_model(const Model<float>&);
template Model<double> cast_model(const Model<double>&);

}  // namespace tgcn
