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


// tgcn: train, eval, audit, sweep and synth commands.

#include <unistd.h>

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "tgcn/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Tensor-decomposition graph encoder for knowledge graph completion"};
  app.require_subcommand(1);

  tgcn::TrainArgs train;
  std::string train_out;
  std::uint64_t train_seed = 0;
  auto* train_cmd = app.add_subcommand("train", "train a model from a config file");
  train_cmd->add_option("--config", train.config, "run config")->required()->check(CLI::ExistingFile);
  auto* train_out_opt = train_cmd->add_option("--out", train_out, "output directory (overrides out_dir)");
  auto* train_seed_opt = train_cmd->add_option("--seed", train_seed, "seed (overrides seed)");

  tgcn::EvalArgs eval;
  std::string eval_out, eval_data;
  auto* eval_cmd = app.add_subcommand("eval", "rank a split with a saved checkpoint");
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "checkpoint file")->required();
  eval_cmd->add_option("--split", eval.split, "valid or test")->check(CLI::IsMember({"train", "valid", "test"}));
  eval_cmd->add_option("--seed", eval.seed, "tie-breaking seed");
  auto* eval_out_opt = eval_cmd->add_option("--out", eval_out, "report path");
  auto* eval_data_opt = eval_cmd->add_option("--data-dir", eval_data, "dataset directory override");
  eval_cmd->add_option("--threads", eval.threads, "ranking threads")->check(CLI::PositiveNumber);

  std::filesystem::path audit_config;
  auto* audit_cmd = app.add_subcommand("audit", "print parameter counts for a config");
  audit_cmd->add_option("--config", audit_config, "run config")->required()->check(CLI::ExistingFile);

  tgcn::SweepArgs sweep;
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "train and evaluate once per value of n_b or g_s");
  sweep_cmd->add_option("--config", sweep.config, "base run config")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--key", sweep.key, "n_b or g_s")->required()->check(CLI::IsMember({"n_b", "g_s"}));
  sweep_cmd->add_option("--values", sweep.values, "values to try (g_s also accepts 'all')")
      ->required()
      ->delimiter(',');
  auto* sweep_out_opt = sweep_cmd->add_option("--out", sweep_out, "sweep root directory");
  sweep_cmd->add_option("--parallel", sweep.parallel, "concurrent runs as child processes")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_flag("--counts-only", sweep.counts_only, "skip training; report parameter counts");

  tgcn::SyntheticSpec synth;
  std::filesystem::path synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "write a generated clustered dataset");
  synth_cmd->add_option("--out", synth_out, "dataset directory")->required();
  synth_cmd->add_option("--entities", synth.num_entities, "entity count");
  synth_cmd->add_option("--relations", synth.num_relations, "relation count");
  synth_cmd->add_option("--cluster-size", synth.cluster_size, "entities per cluster");
  synth_cmd->add_option("--density", synth.density, "edge probability between paired clusters");
  synth_cmd->add_option("--valid-fraction", synth.valid_fraction, "held-out share for validation");
  synth_cmd->add_option("--test-fraction", synth.test_fraction, "held-out share for test");
  synth_cmd->add_option("--seed", synth.seed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  if (train_cmd->parsed()) {
    if (*train_out_opt) train.out = train_out;
    if (*train_seed_opt) train.seed = train_seed;
    return tgcn::cmd_train(train, environ, std::cout, std::cerr);
  }
  if (eval_cmd->parsed()) {
    if (*eval_out_opt) eval.out = eval_out;
    if (*eval_data_opt) eval.data_dir = eval_data;
    return tgcn::cmd_eval(eval, std::cout, std::cerr);
  }
  if (audit_cmd->parsed()) return tgcn::cmd_audit(audit_config, environ, std::cout, std::cerr);
  if (sweep_cmd->parsed()) {
    if (*sweep_out_opt) sweep.out = sweep_out;
    sweep.self = std::filesystem::read_symlink("/proc/self/exe");
    return tgcn::cmd_sweep(sweep, environ, std::cout, std::cerr);
  }
  return tgcn::cmd_synth(synth, synth_out, std::cout, std::cerr);
}
