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
#include <vector>

#include "tgcn/kgdata.hpp"

namespace tgcn {

/// Edges of a (sub)graph re-indexed over a local node set and grouped by
/// relation. Each triple (s, r, t) is one in-edge of t carrying s's state,
/// weighted by 1/c_{t,r} where c_{t,r} is the number of r-labelled in-edges of t.
class MessageGraph {
 public:
  struct Edge {
    Eigen::Index source = 0;  // local ids
    Eigen::Index target = 0;
    double weight = 0.0;
  };

  MessageGraph() = default;

  /// `nodes` must contain every endpoint of `triples`; duplicates in `nodes` are not allowed.
  static MessageGraph build(std::span<const Triple> triples, std::vector<EntityId> nodes,
                            std::size_t num_entities);

  /// All entities of the vocabulary are nodes.
  static MessageGraph over_all_entities(std::span<const Triple> triples, std::size_t num_entities);

  /// Only the sampled triples' endpoints are nodes.
  static MessageGraph over_active_entities(const Subgraph& sub, std::size_t num_entities);

  Eigen::Index num_nodes() const { return static_cast<Eigen::Index>(nodes_.size()); }
  const std::vector<EntityId>& nodes() const { return nodes_; }
  /// Local id of a global entity, or -1.
  Eigen::Index local(EntityId entity) const;

  /// Distinct relations carrying at least one edge, ascending.
  const std::vector<RelationId>& relations() const { return relations_; }
  /// Edges for relations()[group].
  const std::vector<Edge>& edges(std::size_t group) const { return edges_[group]; }
  std::size_t num_edges() const { return num_edges_; }

 private:
  std::vector<EntityId> nodes_;
  std::vector<Eigen::Index> local_;
  std::vector<RelationId> relations_;
  std::vector<std::vector<Edge>> edges_;
  std::size_t num_edges_ = 0;
};

}  // namespace tgcn
