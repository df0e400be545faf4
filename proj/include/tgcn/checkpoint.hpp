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

// Single-file binary checkpoints.
//
// Layout (little-endian): "TGCNCKPT", u32 version, config text, metadata
// pairs, entity and relation vocabularies, augmented flag, named parameter
// arrays (name, rows, cols, raw float32), then a 64-bit FNV-1a checksum of
// everything before it.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "tgcn/config.hpp"
#include "tgcn/kgdata.hpp"
#include "tgcn/model.hpp"

namespace tgcn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::string config_text;  // serialized RunConfig
  std::map<std::string, std::string> metadata;
  Vocabulary entities;
  Vocabulary relations;
  bool augmented = true;
  Model<float> model;

  RunConfig run_config() const;
};

std::string encode_checkpoint(const Checkpoint& checkpoint);
/// Throws CheckpointError on bad magic, version, checksum, truncation or a
/// parameter set that does not match the stored configuration.
Checkpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tgcn
