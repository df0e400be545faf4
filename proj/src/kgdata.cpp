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

#include "tgcn/kgdata.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace tgcn {

namespace {

constexpr std::string_view kInverseSuffix = "^-1";

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DatasetError("cannot open triple file '" + path.string() + "'");
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<Triple> dedupe(std::vector<Triple> triples) {
  std::set<Triple> seen;
  std::vector<Triple> out;
  out.reserve(triples.size());
  for (const Triple& t : triples) {
    if (seen.insert(t).second) out.push_back(t);
  }
  return out;
}

}  // namespace

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "valid") return Split::kValid;
  if (name == "test") return Split::kTest;
  throw ArgumentError("unknown split '" + std::string(name) + "' (expected train, valid or test)");
}

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary(std::vector<std::string> names) {
  for (auto& n : names) {
    if (contains(n)) throw ArgumentError("duplicate vocabulary entry '" + n + "'");
    intern(n);
  }
}

std::int32_t Vocabulary::intern(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it != index_.end()) return it->second;
  const auto id = static_cast<std::int32_t>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), id);
  return id;
}

std::int32_t Vocabulary::id(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw ArgumentError("unknown vocabulary entry '" + std::string(name) + "'");
  return it->second;
}

bool Vocabulary::contains(std::string_view name) const {
  return index_.find(std::string(name)) != index_.end();
}

// ---------------------------------------------------------------------------
// FilterIndex

FilterIndex::FilterIndex(std::size_t num_relations,
                         std::span<const std::vector<Triple>* const> splits)
    : num_relations_(num_relations) {
  for (const auto* split : splits) {
    for (const Triple& t : *split) {
      targets_[key(t.source, t.relation)].push_back(t.target);
    }
  }
  for (auto& [k, v] : targets_) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
}

std::span<const EntityId> FilterIndex::targets(EntityId source, RelationId relation) const {
  auto it = targets_.find(key(source, relation));
  if (it == targets_.end()) return {};
  return it->second;
}

bool FilterIndex::contains(const Triple& triple) const {
  auto t = targets(triple.source, triple.relation);
  return std::binary_search(t.begin(), t.end(), triple.target);
}

// ---------------------------------------------------------------------------
// KnowledgeGraph

KnowledgeGraph::KnowledgeGraph(Vocabulary entities, Vocabulary relations, std::vector<Triple> train,
                               std::vector<Triple> valid, std::vector<Triple> test)
    : entities_(std::move(entities)),
      relations_(std::move(relations)),
      train_(dedupe(std::move(train))),
      valid_(dedupe(std::move(valid))),
      test_(dedupe(std::move(test))) {
  validate();
  rebuild_filter();
}

const std::vector<Triple>& KnowledgeGraph::split(Split which) const {
  switch (which) {
    case Split::kTrain: return train_;
    case Split::kValid: return valid_;
    case Split::kTest: return test_;
  }
  return train_;
}

std::vector<Triple> KnowledgeGraph::raw_triples(Split which) const {
  std::vector<Triple> out;
  const auto raw = static_cast<RelationId>(num_raw_relations());
  for (const Triple& t : split(which)) {
    if (t.relation < raw) out.push_back(t);
  }
  return out;
}

RelationId KnowledgeGraph::inverse(RelationId relation) const {
  if (!augmented_) throw StateError("inverse relations exist only after add_reciprocals");
  const auto raw = static_cast<RelationId>(num_raw_relations());
  if (relation < 0 || relation >= 2 * raw) throw ArgumentError("relation id out of range");
  return relation < raw ? relation + raw : relation - raw;
}

void KnowledgeGraph::validate() const {
  const auto ne = static_cast<EntityId>(entities_.size());
  const auto nr = static_cast<RelationId>(relations_.size());
  for (const auto* split : {&train_, &valid_, &test_}) {
    for (const Triple& t : *split) {
      if (t.source < 0 || t.source >= ne || t.target < 0 || t.target >= ne || t.relation < 0 ||
          t.relation >= nr) {
        throw DatasetError("triple references an id outside the vocabularies");
      }
    }
  }
}

void KnowledgeGraph::rebuild_filter() {
  const std::vector<Triple>* splits[] = {&train_, &valid_, &test_};
  filter_ = FilterIndex(relations_.size(), splits);
}

std::vector<Triple> parse_triples(std::string_view text, std::string_view source_name,
                                  Vocabulary& entities, Vocabulary& relations) {
  std::vector<Triple> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    std::string_view fields[3];
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      const std::string_view field =
          line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start);
      if (count < 3) fields[count] = field;
      ++count;
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (count != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      std::ostringstream msg;
      msg << source_name << ":" << line_no << ": expected 3 tab-separated fields, found " << count;
      throw ParseError(msg.str());
    }
    Triple t;
    t.source = entities.intern(fields[0]);
    t.relation = relations.intern(fields[1]);
    t.target = entities.intern(fields[2]);
    out.push_back(t);
    if (end == text.size()) break;
  }
  return out;
}

KnowledgeGraph load_dataset(const std::filesystem::path& train_path,
                            const std::filesystem::path& valid_path,
                            const std::filesystem::path& test_path) {
  Vocabulary entities;
  Vocabulary relations;
  auto train = parse_triples(read_file(train_path), train_path.string(), entities, relations);
  if (train.empty()) {
    throw DatasetError("training file '" + train_path.string() + "' contains no triples");
  }
  auto valid = parse_triples(read_file(valid_path), valid_path.string(), entities, relations);
  auto test = parse_triples(read_file(test_path), test_path.string(), entities, relations);
  return KnowledgeGraph(std::move(entities), std::move(relations), std::move(train),
                        std::move(valid), std::move(test));
}

KnowledgeGraph add_reciprocals(const KnowledgeGraph& kg) {
  if (kg.augmented_) throw StateError("knowledge graph already carries reciprocal relations");
  KnowledgeGraph out = kg;
  const auto raw = static_cast<RelationId>(kg.relations_.size());
  for (RelationId r = 0; r < raw; ++r) {
    std::string name = kg.relations_.name(r) + std::string(kInverseSuffix);
    if (out.relations_.contains(name)) {
      throw DatasetError("relation '" + name + "' collides with a generated inverse name");
    }
    out.relations_.intern(name);
  }
  auto augment = [raw](const std::vector<Triple>& split) {
    std::vector<Triple> result = split;
    result.reserve(split.size() * 2);
    for (const Triple& t : split) result.push_back({t.target, t.relation + raw, t.source});
    return result;
  };
  out.train_ = dedupe(augment(kg.train_));
  out.valid_ = dedupe(augment(kg.valid_));
  out.test_ = dedupe(augment(kg.test_));
  out.augmented_ = true;
  out.rebuild_filter();
  return out;
}

// ---------------------------------------------------------------------------
// Subgraphs

Subgraph Subgraph::from_triples(std::vector<Triple> triples) {
  Subgraph sub;
  sub.triples = std::move(triples);
  std::vector<EntityId> active;
  active.reserve(sub.triples.size() * 2);
  for (const Triple& t : sub.triples) {
    sub.adjacency[t.target].push_back({t.source, t.relation});
    active.push_back(t.source);
    active.push_back(t.target);
  }
  std::sort(active.begin(), active.end());
  active.erase(std::unique(active.begin(), active.end()), active.end());
  sub.active_entities = std::move(active);
  return sub;
}

Subgraph sample_subgraph(const KnowledgeGraph& kg, std::size_t subgraph_size, Rng& rng) {
  if (subgraph_size == 0) throw ArgumentError("subgraph size g_s must be at least 1");
  const auto& train = kg.train();
  if (subgraph_size >= train.size()) return Subgraph::from_triples(train);
  std::vector<Triple> picked;
  picked.reserve(subgraph_size);
  std::sample(train.begin(), train.end(), std::back_inserter(picked), subgraph_size, rng);
  return Subgraph::from_triples(std::move(picked));
}

Subgraph full_training_graph(const KnowledgeGraph& kg) { return Subgraph::from_triples(kg.train()); }

}  // namespace tgcn
