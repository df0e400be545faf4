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


#include "tgcn/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace tgcn {

namespace {

std::string padded(char prefix, std::int64_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%0*lld", prefix, width, static_cast<long long>(i));
  return buf;
}

}  // namespace

KnowledgeGraph make_synthetic_kg(const SyntheticSpec& spec) {
  if (spec.num_entities < 2 || spec.num_relations < 1 || spec.cluster_size < 1 ||
      spec.num_entities % spec.cluster_size != 0) {
    throw ArgumentError("synthetic graph needs num_entities >= 2 divisible by cluster_size and >= 1 relation");
  }
  if (!(spec.density > 0.0 && spec.density <= 1.0)) throw ArgumentError("density must lie in (0, 1]");
  if (spec.valid_fraction < 0.0 || spec.test_fraction < 0.0 || spec.valid_fraction + spec.test_fraction >= 1.0) {
    throw ArgumentError("held-out fractions must be >= 0 and sum below 1");
  }
  Rng rng(spec.seed);
  const std::int64_t n_clusters = spec.num_entities / spec.cluster_size;

  std::vector<EntityId> order(static_cast<std::size_t>(spec.num_entities));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  auto member = [&](std::int64_t cluster, std::int64_t k) {
    return order[static_cast<std::size_t>(cluster * spec.cluster_size + k)];
  };

  std::bernoulli_distribution keep(spec.density);
  std::vector<Triple> all;
  for (RelationId r = 0; r < spec.num_relations; ++r) {
    std::vector<std::int64_t> clusters(static_cast<std::size_t>(n_clusters));
    std::iota(clusters.begin(), clusters.end(), 0);
    std::shuffle(clusters.begin(), clusters.end(), rng);
    std::vector<std::int64_t> partner(static_cast<std::size_t>(n_clusters));
    for (std::size_t i = 0; i + 1 < clusters.size(); i += 2) {
      partner[static_cast<std::size_t>(clusters[i])] = clusters[i + 1];
      partner[static_cast<std::size_t>(clusters[i + 1])] = clusters[i];
    }
    if (clusters.size() % 2 == 1) partner[static_cast<std::size_t>(clusters.back())] = clusters.back();
    for (std::int64_t a = 0; a < n_clusters; ++a) {
      const std::int64_t b = partner[static_cast<std::size_t>(a)];
      for (std::int64_t i = 0; i < spec.cluster_size; ++i) {
        for (std::int64_t j = 0; j < spec.cluster_size; ++j) {
          const EntityId s = member(a, i), t = member(b, j);
          if (s == t) continue;
          if (keep(rng)) all.push_back({s, r, t});
        }
      }
    }
  }
  std::shuffle(all.begin(), all.end(), rng);

  const auto n_valid = static_cast<std::size_t>(spec.valid_fraction * static_cast<double>(all.size()));
  const auto n_test = static_cast<std::size_t>(spec.test_fraction * static_cast<double>(all.size()));
  std::vector<Triple> valid, test, train;
  // Held-out triples must not mention entities missing from training; walk the
  // shuffled list and only hold out a triple while both ends keep a train edge.
  std::vector<std::int64_t> degree(static_cast<std::size_t>(spec.num_entities), 0);
  for (const Triple& t : all) {
    ++degree[static_cast<std::size_t>(t.source)];
    ++degree[static_cast<std::size_t>(t.target)];
  }
  for (const Triple& t : all) {
    auto& ds = degree[static_cast<std::size_t>(t.source)];
    auto& dt = degree[static_cast<std::size_t>(t.target)];
    const bool can_hold = ds > 1 && dt > 1;
    if (can_hold && valid.size() < n_valid) {
      valid.push_back(t);
    } else if (can_hold && test.size() < n_test) {
      test.push_back(t);
    } else {
      train.push_back(t);
      continue;
    }
    --ds;
    --dt;
  }

  const int width = static_cast<int>(std::to_string(spec.num_entities - 1).size());
  std::vector<std::string> entity_names, relation_names;
  for (std::int64_t e = 0; e < spec.num_entities; ++e) entity_names.push_back(padded('e', e, width));
  for (std::int64_t r = 0; r < spec.num_relations; ++r) relation_names.push_back(padded('r', r, 1));
  return KnowledgeGraph(Vocabulary(std::move(entity_names)), Vocabulary(std::move(relation_names)),
                        std::move(train), std::move(valid), std::move(test));
}

void write_dataset(const KnowledgeGraph& kg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::pair<const char*, Split> files[] = {
      {"train.txt", Split::kTrain}, {"valid.txt", Split::kValid}, {"test.txt", Split::kTest}};
  for (const auto& [file, split] : files) {
    std::ofstream out(dir / file, std::ios::trunc);
    if (!out) throw DatasetError("cannot write " + (dir / file).string());
    for (const Triple& t : kg.raw_triples(split)) {
      out << kg.entities().name(t.source) << '\t' << kg.relations().name(t.relation) << '\t'
          << kg.entities().name(t.target) << '\n';
    }
  }
}

}  // namespace tgcn
