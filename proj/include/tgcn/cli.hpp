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

// Command implementations behind the tgcn executable.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tgcn/config.hpp"
#include "tgcn/evaluation.hpp"
#include "tgcn/synthetic.hpp"

namespace tgcn {

/// Loads data_dir/{train,valid,test}.txt and adds reciprocals when configured.
KnowledgeGraph load_configured_dataset(const RunConfig& config);

struct TrainOutcome {
  RankingReport test_report;
  double best_valid_mrr = 0.0;
  std::int64_t best_iteration = 0;
  std::int64_t iterations_run = 0;
  bool stopped_early = false;
  ParameterCount params;
};

/// Trains into config.out_dir: config.cfg, entities.txt, relations.txt,
/// train.log, best.ckpt, last.ckpt and metrics.txt.
TrainOutcome run_training(const RunConfig& config, std::ostream& log);

/// Parameter counts for the configured model; dataset sizes come from the data
/// files when present, otherwise from the num_entities/num_relations keys.
ParameterCount audit_parameters(const RunConfig& config);
void write_audit(std::ostream& out, const RunConfig& config, const ParameterCount& counts);

/// Metrics records: "key: value" per line.
std::map<std::string, std::string> read_records(const std::filesystem::path& path);

struct SweepRow {
  std::string value;
  std::optional<double> mrr;  // absent when only counting parameters
  std::optional<std::int64_t> enfp;
};

/// Values for `key` in {n_b, g_s}; "all" for g_s means the whole training split.
RunConfig sweep_variant(const RunConfig& base, const std::string& key, const std::string& value,
                        const std::filesystem::path& run_dir);
void write_sweep_table(std::ostream& out, const std::string& key, const std::vector<SweepRow>& rows);

// Entry points; return the process exit status and report errors on `err`.
struct TrainArgs {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
};
int cmd_train(const TrainArgs& args, char** envp, std::ostream& out, std::ostream& err);

struct EvalArgs {
  std::filesystem::path checkpoint;
  std::string split = "test";
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> data_dir;
  unsigned threads = 1;
};
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);

int cmd_audit(const std::filesystem::path& config, char** envp, std::ostream& out, std::ostream& err);

struct SweepArgs {
  std::filesystem::path config;
  std::string key;
  std::vector<std::string> values;
  std::optional<std::filesystem::path> out;
  unsigned parallel = 1;      // concurrent child processes; 1 = in-process, sequential
  bool counts_only = false;   // skip training, report parameter counts only
  std::filesystem::path self; // executable used for child processes
};
int cmd_sweep(const SweepArgs& args, char** envp, std::ostream& out, std::ostream& err);

int cmd_synth(const SyntheticSpec& spec, const std::filesystem::path& dir, std::ostream& out, std::ostream& err);

}  // namespace tgcn
