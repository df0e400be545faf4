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

#include "tgcn/rgcn.hpp"

#include <sstream>

namespace tgcn {

using Eigen::Index;

WeightScheme parse_weight_scheme(std::string_view name) {
  if (name == "full") return WeightScheme::kFull;
  if (name == "basis") return WeightScheme::kBasis;
  if (name == "block") return WeightScheme::kBlock;
  if (name == "cp") return WeightScheme::kCp;
  throw ArgumentError("unknown R-GCN weight scheme '" + std::string(name) + "'");
}

std::string_view weight_scheme_name(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::kFull: return "full";
    case WeightScheme::kBasis: return "basis";
    case WeightScheme::kBlock: return "block";
    case WeightScheme::kCp: return "cp";
  }
  return "?";
}

std::int64_t weight_bank_parameter_count(WeightScheme scheme, std::int64_t num_relations,
                                         std::int64_t dim, std::int64_t num_bases,
                                         std::int64_t num_blocks) {
  switch (scheme) {
    case WeightScheme::kFull: return num_relations * dim * dim;
    case WeightScheme::kBasis: return num_bases * dim * dim + num_relations * num_bases;
    case WeightScheme::kBlock: return num_relations * dim * (dim / num_blocks);
    case WeightScheme::kCp: return num_bases * (num_relations + 2 * dim);
  }
  return 0;
}

template <typename Real>
RelationWeightBank<Real> RelationWeightBank<Real>::make(WeightScheme scheme, Index num_relations,
                                                        Index dim, Index num_bases, Index num_blocks) {
  RelationWeightBank bank;
  bank.scheme = scheme;
  bank.num_relations = num_relations;
  bank.dim = dim;
  switch (scheme) {
    case WeightScheme::kFull:
      bank.weights = Matrix<Real>::Zero(num_relations * dim, dim);
      break;
    case WeightScheme::kBasis:
      if (num_bases < 1) throw ArgumentError("basis scheme requires n_b >= 1");
      bank.num_bases = num_bases;
      bank.bases = Matrix<Real>::Zero(num_bases * dim, dim);
      bank.coefficients = Matrix<Real>::Zero(num_relations, num_bases);
      break;
    case WeightScheme::kBlock: {
      if (num_blocks < 1 || dim % num_blocks != 0) {
        std::ostringstream msg;
        msg << "block scheme: number of blocks " << num_blocks << " must divide d = " << dim;
        throw ArgumentError(msg.str());
      }
      bank.num_blocks = num_blocks;
      const Index s = dim / num_blocks;
      bank.blocks = Matrix<Real>::Zero(num_relations * num_blocks * s, s);
      break;
    }
    case WeightScheme::kCp:
      if (num_bases < 1) throw ArgumentError("CP scheme requires n_b >= 1");
      bank.num_bases = num_bases;
      bank.u1 = Matrix<Real>::Zero(num_bases, num_relations);
      bank.u2 = Matrix<Real>::Zero(num_bases, dim);
      bank.u3 = Matrix<Real>::Zero(num_bases, dim);
      break;
  }
  return bank;
}

template <typename Real>
RelationWeightBank<Real> RelationWeightBank<Real>::zeros_like() const {
  return make(scheme, num_relations, dim, num_bases, num_blocks);
}

template <typename Real>
std::int64_t RelationWeightBank<Real>::parameter_count() const {
  return weights.size() + bases.size() + coefficients.size() + blocks.size() + u1.size() + u2.size() +
         u3.size();
}

template <typename Real>
Matrix<Real> materialize_weight(const RelationWeightBank<Real>& bank, RelationId relation) {
  if (relation < 0 || relation >= bank.num_relations) {
    std::ostringstream msg;
    msg << "relation id " << relation << " outside weight bank of " << bank.num_relations;
    throw ArgumentError(msg.str());
  }
  const Index d = bank.dim;
  switch (bank.scheme) {
    case WeightScheme::kFull:
      return bank.weights.middleRows(relation * d, d);
    case WeightScheme::kBasis: {
      Matrix<Real> w = Matrix<Real>::Zero(d, d);
      for (Index b = 0; b < bank.num_bases; ++b) w += bank.coefficients(relation, b) * bank.bases.middleRows(b * d, d);
      return w;
    }
    case WeightScheme::kBlock: {
      const Index s = bank.block_size();
      Matrix<Real> w = Matrix<Real>::Zero(d, d);
      for (Index b = 0; b < bank.num_blocks; ++b) {
        w.block(b * s, b * s, s, s) = bank.blocks.middleRows((relation * bank.num_blocks + b) * s, s);
      }
      return w;
    }
    case WeightScheme::kCp: {
      Matrix<Real> w = Matrix<Real>::Zero(d, d);
      for (Index b = 0; b < bank.num_bases; ++b) {
        w.noalias() += bank.u1(b, relation) * bank.u2.row(b).transpose() * bank.u3.row(b);
      }
      return w;
    }
  }
  return {};
}

template <typename Real>
void materialize_weight_backward(const RelationWeightBank<Real>& bank, RelationId relation,
                                 const Matrix<Real>& grad_weight, RelationWeightBank<Real>& grad_bank) {
  const Index d = bank.dim;
  switch (bank.scheme) {
    case WeightScheme::kFull:
      grad_bank.weights.middleRows(relation * d, d) += grad_weight;
      break;
    case WeightScheme::kBasis:
      for (Index b = 0; b < bank.num_bases; ++b) {
        const auto basis = bank.bases.middleRows(b * d, d);
        grad_bank.bases.middleRows(b * d, d) += bank.coefficients(relation, b) * grad_weight;
        grad_bank.coefficients(relation, b) += (basis.array() * grad_weight.array()).sum();
      }
      break;
    case WeightScheme::kBlock: {
      const Index s = bank.block_size();
      for (Index b = 0; b < bank.num_blocks; ++b) {
        grad_bank.blocks.middleRows((relation * bank.num_blocks + b) * s, s) += grad_weight.block(b * s, b * s, s, s);
      }
      break;
    }
    case WeightScheme::kCp:
      for (Index b = 0; b < bank.num_bases; ++b) {
        // dW/du1[b,r] = u2[b]^T u3[b];  dW/du2[b,i] = u1[b,r] u3[b,:];  dW/du3[b,k] = u1[b,r] u2[b,:]
        const Vector<Real> g_u3 = grad_weight.transpose() * bank.u2.row(b).transpose();
        const Vector<Real> g_u2 = grad_weight * bank.u3.row(b).transpose();
        grad_bank.u1(b, relation) += bank.u2.row(b) * g_u2;
        grad_bank.u2.row(b) += bank.u1(b, relation) * g_u2.transpose();
        grad_bank.u3.row(b) += bank.u1(b, relation) * g_u3.transpose();
      }
      break;
  }
}

template <typename Real>
Matrix<Real> rgcn_layer_forward(const RgcnLayer<Real>& layer, const MessageGraph& graph,
                                const Matrix<Real>& h, double dropout_rate, bool training, Rng* rng,
                                RgcnTape<Real>* tape) {
  if (h.rows() != graph.num_nodes() || h.cols() != layer.bank.dim) {
    throw ShapeError("R-GCN layer input does not match graph nodes x d");
  }
  Matrix<Real> pre = h * layer.loop_weight.transpose();
  std::vector<Matrix<Real>> weights(graph.relations().size());
  for (std::size_t g = 0; g < graph.relations().size(); ++g) {
    weights[g] = materialize_weight(layer.bank, graph.relations()[g]);
    const auto& edges = graph.edges(g);
    Matrix<Real> sources(static_cast<Index>(edges.size()), h.cols());
    for (std::size_t e = 0; e < edges.size(); ++e) sources.row(static_cast<Index>(e)) = h.row(edges[e].source);
    const Matrix<Real> messages = sources * weights[g].transpose();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      pre.row(edges[e].target) += static_cast<Real>(edges[e].weight) * messages.row(static_cast<Index>(e));
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
    tape->weights = std::move(weights);
  }
  return out;
}

template <typename Real>
Matrix<Real> rgcn_layer_backward(const RgcnLayer<Real>& layer, const MessageGraph& graph,
                                 const RgcnTape<Real>& tape, Matrix<Real> grad_out,
                                 RgcnLayer<Real>& grad_layer) {
  activation_backward(layer.activation, tape.pre, grad_out);
  dropout_backward(tape.mask, grad_out);
  const Matrix<Real>& grad_pre = grad_out;
  const Matrix<Real>& h = tape.input;

  grad_layer.loop_weight.noalias() += grad_pre.transpose() * h;
  Matrix<Real> grad_h = grad_pre * layer.loop_weight;
  for (std::size_t g = 0; g < graph.relations().size(); ++g) {
    const auto& edges = graph.edges(g);
    const auto m = static_cast<Index>(edges.size());
    Matrix<Real> sources(m, h.cols());
    Matrix<Real> weighted(m, grad_pre.cols());
    for (Index e = 0; e < m; ++e) {
      const auto& edge = edges[static_cast<std::size_t>(e)];
      sources.row(e) = h.row(edge.source);
      weighted.row(e) = static_cast<Real>(edge.weight) * grad_pre.row(edge.target);
    }
    // messages = sources W_r^T  =>  dW_r = weighted^T sources, dsources = weighted W_r
    const Matrix<Real> grad_weight = weighted.transpose() * sources;
    const Matrix<Real> grad_sources = weighted * tape.weights[g];
    for (Index e = 0; e < m; ++e) grad_h.row(edges[static_cast<std::size_t>(e)].source) += grad_sources.row(e);
    materialize_weight_backward(layer.bank, graph.relations()[g], grad_weight, grad_layer.bank);
  }
  return grad_h;
}

#define TGCN_INSTANTIATE(Real)                                                                     \
  template struct RelationWeightBank<Real>;                                                        \
  template Matrix<Real> materialize_weight(const RelationWeightBank<Real>&, RelationId);           \
  template void materialize_weight_backward(const RelationWeightBank<Real>&, RelationId,           \
                                            const Matrix<Real>&, RelationWeightBank<Real>&);       \
  template Matrix<Real> rgcn_layer_forward(const RgcnLayer<Real>&, const MessageGraph&,            \
                                           const Matrix<Real>&, double, bool, Rng*, RgcnTape<Real>*); \
  template Matrix<Real> rgcn_layer_backward(const RgcnLayer<Real>&, const MessageGraph&,           \
                                            const RgcnTape<Real>&, Matrix<Real>, RgcnLayer<Real>&);

TGCN_INSTANTIATE(float)
TGCN_INSTANTIATE(double)

#undef TGCN_INSTANTIATE

}  // namespace tgcn
