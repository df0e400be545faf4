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

#include "tgcn/decoder.hpp"

#include <map>
#include <sstream>

#include "tgcn/encoder.hpp"

namespace tgcn {

using Eigen::Index;

DecoderKind parse_decoder_kind(std::string_view name) {
  if (name == "distmult") return DecoderKind::kDistMult;
  if (name == "tucker") return DecoderKind::kTucker;
  throw ArgumentError("unknown decoder '" + std::string(name) + "' (expected distmult or tucker)");
}

std::string_view decoder_kind_name(DecoderKind kind) {
  return kind == DecoderKind::kTucker ? "tucker" : "distmult";
}

template <typename Real>
DecoderParams<Real> DecoderParams<Real>::tucker(Index entity_dim, Index relation_dim) {
  DecoderParams p;
  p.kind = DecoderKind::kTucker;
  p.core = Tensor3<Real>(entity_dim, relation_dim, entity_dim);
  return p;
}

template <typename Real>
DecoderParams<Real> DecoderParams<Real>::zeros_like() const {
  if (kind == DecoderKind::kDistMult) return distmult();
  return tucker(core.dim(0), core.dim(1));
}

namespace {

template <typename Real>
Vector<Real> query_vector(const DecoderParams<Real>& params, const Vector<Real>& h_s,
                          const Vector<Real>& e_r) {
  if (params.kind == DecoderKind::kDistMult) {
    if (h_s.size() != e_r.size()) {
      std::ostringstream msg;
      msg << "DistMult needs d_e == d_r, got " << h_s.size() << " and " << e_r.size();
      throw ShapeError(msg.str());
    }
    return h_s.cwiseProduct(e_r);
  }
  if (h_s.size() != params.core.dim(0)) throw ShapeError("TuckER: source representation size != d_e");
  return relation_map<Real>(params.core, e_r).transpose() * h_s;
}

}  // namespace

template <typename Real>
Real score(const DecoderParams<Real>& params, const Vector<Real>& h_s, const Vector<Real>& e_r,
           const Vector<Real>& h_t) {
  const Vector<Real> q = query_vector(params, h_s, e_r);
  if (h_t.size() != q.size()) throw ShapeError("target representation size mismatch");
  return q.dot(h_t);
}

template <typename Real>
Vector<Real> score_all_targets(const DecoderParams<Real>& params, const Vector<Real>& h_s,
                               const Vector<Real>& e_r, const Matrix<Real>& candidates) {
  const Vector<Real> q = query_vector(params, h_s, e_r);
  if (candidates.cols() != q.size()) {
    std::ostringstream msg;
    msg << "candidate matrix has " << candidates.cols() << " columns, expected " << q.size();
    throw ShapeError(msg.str());
  }
  return candidates * q;
}

template <typename Real>
Matrix<Real> query_vectors(const DecoderParams<Real>& params, const Matrix<Real>& representations,
                           std::span<const DecoderQuery> queries, const Matrix<Real>& relation_table,
                           double dropout_rate, bool training, Rng* rng, DecoderTape<Real>* tape) {
  const auto b = static_cast<Index>(queries.size());
  const Index d = representations.cols();
  Matrix<Real> q(b, d);
  if (params.kind == DecoderKind::kDistMult) {
    if (relation_table.cols() != d) throw ShapeError("DistMult needs d_e == d_r");
    for (Index i = 0; i < b; ++i) {
      const auto& query = queries[static_cast<std::size_t>(i)];
      q.row(i) = representations.row(query.source).cwiseProduct(relation_table.row(query.relation));
    }
    return q;  // DistMult carries no decoder dropout
  }

  std::map<RelationId, std::size_t> group;
  std::vector<RelationId> relations;
  std::vector<std::size_t> group_of(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    auto [it, inserted] = group.try_emplace(queries[i].relation, relations.size());
    if (inserted) relations.push_back(queries[i].relation);
    group_of[i] = it->second;
  }
  std::vector<Matrix<Real>> maps(relations.size());
  for (std::size_t g = 0; g < relations.size(); ++g) {
    maps[g] = relation_map<Real>(params.core, relation_table.row(relations[g]).transpose());
  }
  for (Index i = 0; i < b; ++i) {
    const auto& query = queries[static_cast<std::size_t>(i)];
    q.row(i).noalias() = representations.row(query.source) * maps[group_of[static_cast<std::size_t>(i)]];
  }
  Matrix<Real> mask;
  dropout_forward(q, dropout_rate, training, rng, &mask);
  if (tape != nullptr) {
    tape->mask = std::move(mask);
    tape->maps = std::move(maps);
    tape->relations = std::move(relations);
    tape->group_of = std::move(group_of);
  }
  return q;
}

template <typename Real>
void query_vectors_backward(const DecoderParams<Real>& params, const Matrix<Real>& representations,
                            std::span<const DecoderQuery> queries, const Matrix<Real>& relation_table,
                            const DecoderTape<Real>& tape, Matrix<Real> grad_queries,
                            DecoderParams<Real>& grad_params, Matrix<Real>& grad_representations,
                            Matrix<Real>& grad_relation_table) {
  const auto b = static_cast<Index>(queries.size());
  if (params.kind == DecoderKind::kDistMult) {
    for (Index i = 0; i < b; ++i) {
      const auto& query = queries[static_cast<std::size_t>(i)];
      grad_representations.row(query.source) += grad_queries.row(i).cwiseProduct(relation_table.row(query.relation));
      grad_relation_table.row(query.relation) += grad_queries.row(i).cwiseProduct(representations.row(query.source));
    }
    return;
  }
  dropout_backward(tape.mask, grad_queries);
  const Index d = representations.cols();
  std::vector<Matrix<Real>> grad_maps(tape.relations.size(), Matrix<Real>::Zero(d, grad_queries.cols()));
  for (Index i = 0; i < b; ++i) {
    const auto& query = queries[static_cast<std::size_t>(i)];
    const std::size_t g = tape.group_of[static_cast<std::size_t>(i)];
    grad_maps[g].noalias() += representations.row(query.source).transpose() * grad_queries.row(i);
    grad_representations.row(query.source).noalias() += grad_queries.row(i) * tape.maps[g].transpose();
  }
  for (std::size_t g = 0; g < tape.relations.size(); ++g) {
    const RelationId r = tape.relations[g];
    relation_map_backward<Real>(params.core, relation_table.row(r).transpose(), grad_maps[g],
                                grad_params.core, grad_relation_table.row(r).transpose());
  }
}

#define TGCN_INSTANTIATE(Real)                                                                     \
  template struct DecoderParams<Real>;                                                             \
  template Real score(const DecoderParams<Real>&, const Vector<Real>&, const Vector<Real>&,        \
                      const Vector<Real>&);                                                        \
  template Vector<Real> score_all_targets(const DecoderParams<Real>&, const Vector<Real>&,         \
                                          const Vector<Real>&, const Matrix<Real>&);               \
  template Matrix<Real> query_vectors(const DecoderParams<Real>&, const Matrix<Real>&,             \
                                      std::span<const DecoderQuery>, const Matrix<Real>&, double,  \
                                      bool, Rng*, DecoderTape<Real>*);                             \
  template void query_vectors_backward(const DecoderParams<Real>&, const Matrix<Real>&,            \
                                       std::span<const DecoderQuery>, const Matrix<Real>&,         \
                                       const DecoderTape<Real>&, Matrix<Real>, DecoderParams<Real>&, \
                                       Matrix<Real>&, Matrix<Real>&);

TGCN_INSTANTIATE(float)
TGCN_INSTANTIATE(double)

#undef TGCN_INSTANTIATE

}  // namespace tgcn
