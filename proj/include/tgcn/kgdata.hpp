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

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tgcn/common.hpp"

namespace tgcn {

struct Triple {
  EntityId source = 0;
  RelationId relation = 0;
  EntityId target = 0;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

enum class Split { kTrain, kValid, kTest };

Split parse_split(std::string_view name);
std::string_view split_name(Split split);

/// Name -> dense id map. Ids follow first-appearance order.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> names);

  std::int32_t intern(std::string_view name);
  std::int32_t id(std::string_view name) const;  // throws ArgumentError if unknown
  bool contains(std::string_view name) const;
  const std::string& name(std::int32_t id) const { return names_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::int32_t> index_;
};

/// Known-true targets per (source, relation), over the union of all splits.
class FilterIndex {
 public:
  FilterIndex() = default;
  FilterIndex(std::size_t num_relations, std::span<const std::vector<Triple>* const> splits);

  /// Sorted true targets for (source, relation); empty span if none.
  std::span<const EntityId> targets(EntityId source, RelationId relation) const;
  bool contains(const Triple& triple) const;

 private:
  std::uint64_t key(EntityId source, RelationId relation) const {
    return static_cast<std::uint64_t>(source) * num_relations_ + static_cast<std::uint64_t>(relation);
  }

  std::size_t num_relations_ = 0;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> targets_;
};

/// Entity/relation vocabularies, the three triple splits and the filter index.
///
/// Once augmented with reciprocals, relation id k + num_raw_relations() is the
/// inverse of relation k and every split is closed under inversion.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  KnowledgeGraph(Vocabulary entities, Vocabulary relations, std::vector<Triple> train,
                 std::vector<Triple> valid, std::vector<Triple> test);

  const Vocabulary& entities() const { return entities_; }
  const Vocabulary& relations() const { return relations_; }
  std::size_t num_entities() const { return entities_.size(); }
  std::size_t num_relations() const { return relations_.size(); }
  std::size_t num_raw_relations() const { return augmented_ ? relations_.size() / 2 : relations_.size(); }
  bool augmented() const { return augmented_; }

  const std::vector<Triple>& split(Split which) const;
  const std::vector<Triple>& train() const { return train_; }
  const std::vector<Triple>& valid() const { return valid_; }
  const std::vector<Triple>& test() const { return test_; }
  const FilterIndex& filter_index() const { return filter_; }

  /// Triples of a split whose relation is not an inverse.
  std::vector<Triple> raw_triples(Split which) const;
  RelationId inverse(RelationId relation) const;

  friend KnowledgeGraph add_reciprocals(const KnowledgeGraph& kg);

 private:
  void validate() const;
  void rebuild_filter();

  Vocabulary entities_;
  Vocabulary relations_;
  std::vector<Triple> train_;
  std::vector<Triple> valid_;
  std::vector<Triple> test_;
  FilterIndex filter_;
  bool augmented_ = false;
};

/// Reads tab-separated source/relation/target files. Vocabularies are the union
/// over train, valid and test (in that order); duplicate lines within a split
/// are dropped. Blank lines are skipped.
KnowledgeGraph load_dataset(const std::filesystem::path& train_path,
                            const std::filesystem::path& valid_path,
                            const std::filesystem::path& test_path);

/// Parses triples from in-memory text, interning names into the vocabularies.
std::vector<Triple> parse_triples(std::string_view text, std::string_view source_name,
                                  Vocabulary& entities, Vocabulary& relations);

/// Appends (t, r^-1, s) for every (s, r, t) in every split and doubles the
/// relation vocabulary. Throws StateError on an already augmented graph.
KnowledgeGraph add_reciprocals(const KnowledgeGraph& kg);

struct InEdge {
  EntityId neighbor = 0;
  RelationId relation = 0;

  friend bool operator==(const InEdge&, const InEdge&) = default;
  friend auto operator<=>(const InEdge&, const InEdge&) = default;
};

/// A random sample of training triples and the graph they induce.
struct Subgraph {
  std::vector<Triple> triples;
  std::map<EntityId, std::vector<InEdge>> adjacency;  // target -> in-edges
  std::vector<EntityId> active_entities;              // sorted, unique

  static Subgraph from_triples(std::vector<Triple> triples);
};

/// Draws min(g_s, |train|) distinct training triples uniformly without replacement.
Subgraph sample_subgraph(const KnowledgeGraph& kg, std::size_t subgraph_size, Rng& rng);

/// The whole training split as one subgraph (used for evaluation-time message passing).
Subgraph full_training_graph(const KnowledgeGraph& kg);

}  // namespace tgcn
