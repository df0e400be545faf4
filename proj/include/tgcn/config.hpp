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

// Flat key = value run configuration.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tgcn/model.hpp"
#include "tgcn/training.hpp"

namespace tgcn {

struct RunConfig {
  // Data. Files are data_dir/{train,valid,test}.txt. The stats keys are only
  // used by audit when the files are absent.
  std::string dataset = "custom";
  std::string data_dir;
  std::int64_t num_entities = 0;
  std::int64_t num_relations = 0;  // raw relation count, before reciprocals
  bool reciprocal = true;

  // Model.
  EncoderKind encoder = EncoderKind::kTgcn;
  CoreLayout layout = CoreLayout::kDense;
  WeightScheme rgcn_scheme = WeightScheme::kCp;
  DecoderKind decoder = DecoderKind::kDistMult;
  std::int64_t dim = 100;
  std::int64_t relation_dim = 100;
  int num_layers = 2;
  std::int64_t num_bases = 100;
  std::int64_t num_blocks = 100;
  Activation hidden_activation = Activation::kRelu;
  Activation output_activation = Activation::kIdentity;

  TrainConfig train;

  // Run.
  std::string out_dir = "runs/default";
  unsigned eval_threads = 1;
};

/// Keys in serialization order, with one-line descriptions.
struct ConfigKey {
  std::string_view name;
  std::string_view help;
};
const std::vector<ConfigKey>& config_keys();

/// Current value of `key` as text; throws ConfigError for unknown keys.
std::string config_value(const RunConfig& config, std::string_view key);

/// Sets one key from text. Throws ConfigError naming the key on failure.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

/// Parses a document on top of the defaults. Lines are `key = value`; `#`
/// starts a comment. All problems are collected into one ConfigError.
RunConfig parse_run_config(std::string_view text, std::string_view source_name = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

/// Applies TGCN_<KEY> environment variables (key upper-cased, '.' as "__").
/// Returns the keys that were overridden.
std::vector<std::string> apply_env_overrides(RunConfig& config, char** envp);

/// Every key, one per line, in config_keys() order.
std::string serialize_run_config(const RunConfig& config);

/// Checks cross-field constraints; throws ConfigError listing offending keys.
void validate_run_config(const RunConfig& config);

/// Architecture for a graph with the given sizes (relations already augmented
/// when config.reciprocal is set).
ModelConfig model_config(const RunConfig& config, std::int64_t num_entities, std::int64_t num_relations);

/// Architecture from the stats keys, for auditing without data files.
ModelConfig model_config_from_stats(const RunConfig& config);

}  // namespace tgcn
