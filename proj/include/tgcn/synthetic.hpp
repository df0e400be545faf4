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

// Generated knowledge graphs with planted cluster structure.
//
// Entities are partitioned into equal clusters. Each relation pairs clusters
// up at random (a matching, so relations are symmetric at cluster level) and
// links members of paired clusters with probability `density`. A fraction of
// the edges is held out for validation and test.

#pragma once

#include <cstdint>
#include <filesystem>

#include "tgcn/kgdata.hpp"

namespace tgcn {

struct SyntheticSpec {
  std::int64_t num_entities = 200;
  std::int64_t num_relations = 6;
  std::int64_t cluster_size = 4;
  double density = 0.8;
  double valid_fraction = 0.05;
  double test_fraction = 0.05;
  std::uint64_t seed = 7;
};

/// Raw graph (no reciprocals). Every entity occurs in the training split.
KnowledgeGraph make_synthetic_kg(const SyntheticSpec& spec);

/// Writes train.txt, valid.txt and test.txt into `dir` (created if needed).
void write_dataset(const KnowledgeGraph& kg, const std::filesystem::path& dir);

}  // namespace tgcn
