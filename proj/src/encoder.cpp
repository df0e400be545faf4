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

#include "tgcn/encoder.hpp"

#include <sstream>

namespace tgcn {

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "identity" || name == "linear") return Activation::kIdentity;
  throw ArgumentError("unknown activation '" + std::string(name) + "' (expected relu or identity)");
}

std::string_view activation_name(Activation activation) {
  return activation == Activation::kRelu ? "relu" : "identity";
}

template <typename Real>
void apply_activation(Activation activation, Matrix<Real>& x) {
  if (activation == Activation::kRelu) x = x.cwiseMax(Real(0));
}

template <typename Real>
void activation_backward(Activation activation, const Matrix<Real>& pre, Matrix<Real>& grad) {
  if (activation == Activation::kRelu) {
    grad = (pre.array() > Real(0)).select(grad, Real(0));
  }
}

template <typename Real>
void dropout_forward(Matrix<Real>& x, double rate, bool training, Rng* rng, Matrix<Real>* mask) {
  if (mask != nullptr) mask->resize(0, 0);
  if (!training || rate <= 0.0) return;
  if (rate >= 1.0) throw ArgumentError("dropout rate must be < 1");
  if (rng == nullptr) throw ArgumentError("training-mode dropout needs a random source");
  std::bernoulli_distribution keep(1.0 - rate);
  const Real scale = static_cast<Real>(1.0 / (1.0 - rate));
  Matrix<Real> m(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = keep(*rng) ? scale : Real(0);
  x.array() *= m.array();
  if (mask != nullptr) *mask = std::move(m);
}

template <typename Real>
void dropout_backward(const Matrix<Real>& mask, Matrix<Real>& grad) {
  if (mask.size() != 0) grad.array() *= mask.array();
}

namespace {

template <typename Real>
void check_layer_inputs(const EncoderLayer<Real>& layer, const MessageGraph& graph,
                        const Matrix<Real>& h, const Matrix<Real>& relation_table) {
  const auto& dims = layer.core.dims;
  if (h.rows() != graph.num_nodes() || h.cols() != dims.entity) {
    std::ostringstream msg;
    msg << "layer input is " << h.rows() << "x" << h.cols() << ", expected " << graph.num_nodes()
        << "x" << dims.entity;
    throw ShapeError(msg.str());
  }
  if (relation_table.cols() != dims.relation) throw ShapeError("relation table width != d_r");
  if (layer.loop_weight.rows() != dims.output || layer.loop_weight.cols() != dims.entity) {
    throw ShapeError("loop weight must be d_o x d_e");
  }
  if (!graph.relations().empty() && graph.relations().back() >= relation_table.rows()) {
    throw ShapeError("graph relation id exceeds relation table");
  }
}

}  // namespace

template <typename Real>
Matrix<Real> layer_forward(const EncoderLayer<Real>& layer, const MessageGraph& graph,
                           const Matrix<Real>& h, const Matrix<Real>& relation_table,
                           double dropout_rate, bool training, Rng* rng, LayerTape<Real>* tape) {
  check_layer_inputs(layer, graph, h, relation_table);
  const auto& core = layer.core;
  const Eigen::Index n = graph.num_nodes();
  const auto groups = graph.relations().size();

  Matrix<Real> pre = h * layer.loop_weight.transpose();

  if (core.layout == CoreLayout::kDense) {
    std::vector<Matrix<Real>> maps(groups);
    for (std::size_t g = 0; g < groups; ++g) {
      const auto& edges = graph.edges(g);
      maps[g] = relation_map<Real>(core.dense, relation_table.row(graph.relations()[g]).transpose());
      Matrix<Real> sources(static_cast<Eigen::Index>(edges.size()), h.cols());
      for (std::size_t e = 0; e < edges.size(); ++e) sources.row(static_cast<Eigen::Index>(e)) = h.row(edges[e].source);
      const Matrix<Real> messages = sources * maps[g];
      for (std::size_t e = 0; e < edges.size(); ++e) {
        pre.row(edges[e].target) += static_cast<Real>(edges[e].weight) * messages.row(static_cast<Eigen::Index>(e));
      }
    }
    if (tape != nullptr) tape->relation_maps = std::move(maps);
  } else {
    const Matrix<Real> projected = h * core.w2.transpose();  // n x n_b
    Matrix<Real> mix(static_cast<Eigen::Index>(groups), core.rank);
    Matrix<Real> mixed = Matrix<Real>::Zero(n, core.rank);
    for (std::size_t g = 0; g < groups; ++g) {
      const auto gi = static_cast<Eigen::Index>(g);
      mix.row(gi) = (core.w1 * relation_table.row(graph.relations()[g]).transpose()).transpose();
      for (const auto& e : graph.edges(g)) {
        mixed.row(e.target).array() +=
            static_cast<Real>(e.weight) * projected.row(e.source).array() * mix.row(gi).array();
      }
    }
    pre.noalias() += mixed * core.w3;
    if (tape != nullptr) {
      tape->projected = projected;
      tape->mixed = std::move(mixed);
      tape->relation_mix = std::move(mix);
    }
  }

  Matrix<Real> mask;
  dropout_forward(pre, dropout_rate, training, rng, &mask);
  Matrix<Real> out = pre;
  apply_activation(layer.activation, out);
  if (tape != nullptr) {
    tape->input = h;
    tape->pre = std::move(pre);
    tape->mask = std::move(mask);
  }
  return out;
}

template <typename Real>
Matrix<Real> layer_backward(const EncoderLayer<Real>& layer, const MessageGraph& graph,
                            const Matrix<Real>& relation_table, const LayerTape<Real>& tape,
                            Matrix<Real> grad_out, EncoderLayer<Real>& grad_layer,
                            Matrix<Real>& grad_relation_table) {
  const auto& core = layer.core;
  const Matrix<Real>& h = tape.input;
  const auto groups = graph.relations().size();

  activation_backward(layer.activation, tape.pre, grad_out);
  dropout_backward(tape.mask, grad_out);
  const Matrix<Real>& grad_pre = grad_out;

  grad_layer.loop_weight.noalias() += grad_pre.transpose() * h;
  Matrix<Real> grad_h = grad_pre * layer.loop_weight;

  if (core.layout == CoreLayout::kDense) {
    for (std::size_t g = 0; g < groups; ++g) {
      const auto& edges = graph.edges(g);
      const RelationId r = graph.relations()[g];
      const auto m = static_cast<Eigen::Index>(edges.size());
      Matrix<Real> sources(m, h.cols());
      Matrix<Real> weighted(m, grad_pre.cols());
      for (Eigen::Index e = 0; e < m; ++e) {
        const auto& edge = edges[static_cast<std::size_t>(e)];
        sources.row(e) = h.row(edge.source);
        weighted.row(e) = static_cast<Real>(edge.weight) * grad_pre.row(edge.target);
      }
      const Matrix<Real> grad_map = sources.transpose() * weighted;
      const Matrix<Real> grad_sources = weighted * tape.relation_maps[g].transpose();
      for (Eigen::Index e = 0; e < m; ++e) grad_h.row(edges[static_cast<std::size_t>(e)].source) += grad_sources.row(e);
      relation_map_backward<Real>(core.dense, relation_table.row(r).transpose(), grad_map,
                                  grad_layer.core.dense, grad_relation_table.row(r).transpose());
    }
  } else {
    const Matrix<Real> grad_mixed = grad_pre * core.w3.transpose();  // n x n_b
    grad_layer.core.w3.noalias() += tape.mixed.transpose() * grad_pre;
    Matrix<Real> grad_projected = Matrix<Real>::Zero(h.rows(), core.rank);
    for (std::size_t g = 0; g < groups; ++g) {
      const auto gi = static_cast<Eigen::Index>(g);
      const RelationId r = graph.relations()[g];
      Vector<Real> grad_mix = Vector<Real>::Zero(core.rank);
      for (const auto& e : graph.edges(g)) {
        const Real w = static_cast<Real>(e.weight);
        grad_projected.row(e.source).array() += w * grad_mixed.row(e.target).array() * tape.relation_mix.row(gi).array();
        grad_mix.array() += w * (grad_mixed.row(e.target).array() * tape.projected.row(e.source).array()).transpose();
      }
      grad_layer.core.w1.noalias() += grad_mix * relation_table.row(r);
      grad_relation_table.row(r).noalias() += (core.w1.transpose() * grad_mix).transpose();
    }
    grad_layer.core.w2.noalias() += grad_projected.transpose() * h;
    grad_h.noalias() += grad_projected * core.w2;
  }
  return grad_h;
}

#define TGCN_INSTANTIATE(Real)                                                                    \
  template void apply_activation(Activation, Matrix<Real>&);                                      \
  template void activation_backward(Activation, const Matrix<Real>&, Matrix<Real>&);              \
  template void dropout_forward(Matrix<Real>&, double, bool, Rng*, Matrix<Real>*);                \
  template void dropout_backward(const Matrix<Real>&, Matrix<Real>&);                             \
  template Matrix<Real> layer_forward(const EncoderLayer<Real>&, const MessageGraph&,             \
                                      const Matrix<Real>&, const Matrix<Real>&, double, bool,     \
                                      Rng*, LayerTape<Real>*);                                    \
  template Matrix<Real> layer_backward(const EncoderLayer<Real>&, const MessageGraph&,            \
                                       const Matrix<Real>&, const LayerTape<Real>&, Matrix<Real>, \
                                       EncoderLayer<Real>&, Matrix<Real>&);

TGCN_INSTANTIATE(float)
TGCN_INSTANTIATE(double)

#undef TGCN_INSTANTIATE

}  // namespace tgcn
