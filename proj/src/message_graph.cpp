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

#include "tgcn/message_graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace tgcn {

MessageGraph MessageGraph::build(std::span<const Triple> triples, std::vector<EntityId> nodes,
                                 std::size_t num_entities) {
  MessageGraph g;
  g.nodes_ = std::move(nodes);
  g.local_.assign(num_entities, -1);
  for (std::size_t i = 0; i < g.nodes_.size(); ++i) {
    const EntityId e = g.nodes_[i];
    if (e < 0 || static_cast<std::size_t>(e) >= num_entities) {
      throw ArgumentError("message graph node id out of range");
    }
    if (g.local_[static_cast<std::size_t>(e)] != -1) throw ArgumentError("duplicate message graph node");
    g.local_[static_cast<std::size_t>(e)] = static_cast<Eigen::Index>(i);
  }

  // c_{v,r}: in-degree of v restricted to relation r.
  std::map<RelationId, std::vector<Edge>> grouped;
  std::map<std::pair<Eigen::Index, RelationId>, std::size_t> in_degree;
  for (const Triple& t : triples) {
    const Eigen::Index s = g.local(t.source);
    const Eigen::Index v = g.local(t.target);
    if (s < 0 || v < 0) throw ArgumentError("message graph edge endpoint is not a node");
    grouped[t.relation].push_back({s, v, 0.0});
    ++in_degree[{v, t.relation}];
  }
  for (auto& [relation, edges] : grouped) {
    for (Edge& e : edges) e.weight = 1.0 / static_cast<double>(in_degree[{e.target, relation}]);
    g.relations_.push_back(relation);
    g.num_edges_ += edges.size();
    g.edges_.push_back(std::move(edges));
  }
  return g;
}

MessageGraph MessageGraph::over_all_entities(std::span<const Triple> triples, std::size_t num_entities) {
  std::vector<EntityId> nodes(num_entities);
  std::iota(nodes.begin(), nodes.end(), 0);
  return build(triples, std::move(nodes), num_entities);
}

MessageGraph MessageGraph::over_active_entities(const Subgraph& sub, std::size_t num_entities) {
  return build(sub.triples, sub.active_entities, num_entities);
}

Eigen::Index MessageGraph::local(EntityId entity) const {
  if (entity < 0 || static_cast<std::size_t>(entity) >= local_.size()) return -1;
  return local_[static_cast<std::size_t>(entity)];
}

}  // namespace tgcn
