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


#include "tgcn/cli.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "tgcn/checkpoint.hpp"
#include "tgcn/training.hpp"

namespace tgcn {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_vocab_file(const fs::path& path, const Vocabulary& vocab) {
  std::string text;
  for (const auto& n : vocab.names()) text += n + "\n";
  write_text(path, text);
}

std::string millions(std::int64_t n) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << static_cast<double>(n) / 1e6 << "M";
  return s.str();
}

Checkpoint make_checkpoint(const RunConfig& config, const KnowledgeGraph& kg, const Model<float>& model,
                           std::int64_t iteration, double valid_mrr) {
  Checkpoint ck;
  ck.config_text = serialize_run_config(config);
  ck.entities = kg.entities();
  ck.relations = kg.relations();
  ck.augmented = kg.augmented();
  ck.model = model;
  ck.metadata["iteration"] = std::to_string(iteration);
  std::ostringstream mrr;
  mrr << std::setprecision(17) << valid_mrr;
  ck.metadata["valid_mrr"] = mrr.str();
  return ck;
}

int report_error(std::ostream& err, const std::exception& e) {
  err << "error: " << e.what() << "\n";
  return dynamic_cast<const ConfigError*>(&e) != nullptr ? 2 : 1;
}

RunConfig load_with_env(const fs::path& path, char** envp) {
  RunConfig config = load_run_config(path);
  apply_env_overrides(config, envp);
  return config;
}

}  // namespace

KnowledgeGraph load_configured_dataset(const RunConfig& config) {
  if (config.data_dir.empty()) throw ConfigError("key 'data_dir' is required");
  const fs::path dir(config.data_dir);
  KnowledgeGraph kg = load_dataset(dir / "train.txt", dir / "valid.txt", dir / "test.txt");
  return config.reciprocal ? add_reciprocals(kg) : kg;
}

TrainOutcome run_training(const RunConfig& config, std::ostream& log) {
  validate_run_config(config);
  const KnowledgeGraph kg = load_configured_dataset(config);
  const fs::path out(config.out_dir);
  fs::create_directories(out);
  write_text(out / "config.cfg", serialize_run_config(config));
  write_vocab_file(out / "entities.txt", kg.entities());
  write_vocab_file(out / "relations.txt", kg.relations());

  Rng init_rng(config.train.seed);
  Model<float> model = Model<float>::initialized(
      model_config(config, static_cast<std::int64_t>(kg.num_entities()), static_cast<std::int64_t>(kg.num_relations())),
      init_rng);

  std::ofstream train_log(out / "train.log", std::ios::trunc);
  auto emit = [&](const std::string& line) {
    train_log << line << "\n";
    train_log.flush();
    log << line << std::endl;
  };
  {
    std::ostringstream s;
    s << "dataset " << config.dataset << ": " << kg.num_entities() << " entities, " << kg.num_relations()
      << " relations, " << kg.train().size() << " train triples";
    emit(s.str());
  }

  FitCallbacks callbacks;
  callbacks.on_eval = [&](const EvalPoint& p) {
    std::ostringstream s;
    s << "iter " << p.iteration << " lr " << std::setprecision(6) << p.learning_rate << " loss " << p.train_loss
      << " valid_mrr " << p.valid_mrr;
    emit(s.str());
  };
  callbacks.on_best = [&](const Model<float>& m, const EvalPoint& p) {
    save_checkpoint(out / "best.ckpt", make_checkpoint(config, kg, m, p.iteration, p.valid_mrr));
  };
  FitResult fit_result = fit(model, kg, config.train, callbacks);
  save_checkpoint(out / "last.ckpt",
                  make_checkpoint(config, kg, model, fit_result.iterations_run,
                                  fit_result.history.empty() ? 0.0 : fit_result.history.back().valid_mrr));

  TrainOutcome outcome;
  EvalOptions options;
  options.threads = config.eval_threads;
  outcome.test_report = evaluate(fit_result.best_model, kg, Split::kTest, config.train.seed, options);
  outcome.best_valid_mrr = fit_result.best_valid_mrr;
  outcome.best_iteration = fit_result.best_iteration;
  outcome.iterations_run = fit_result.iterations_run;
  outcome.stopped_early = fit_result.stopped_early;
  outcome.params = count_parameters(fit_result.best_model);

  std::ostringstream metrics;
  write_report(metrics, outcome.test_report, {config.dataset, "test", outcome.params});
  metrics << "enfp: " << outcome.params.enfp << "\n";
  metrics << "best_valid_mrr: " << std::fixed << std::setprecision(6) << outcome.best_valid_mrr << "\n";
  metrics << "best_iteration: " << outcome.best_iteration << "\n";
  metrics << "iterations_run: " << outcome.iterations_run << "\n";
  metrics << "stopped_early: " << (outcome.stopped_early ? "true" : "false") << "\n";
  write_text(out / "metrics.txt", metrics.str());
  std::ostringstream s;
  s << "best valid_mrr " << std::fixed << std::setprecision(4) << outcome.best_valid_mrr << " at iter "
    << outcome.best_iteration << "; test mrr " << outcome.test_report.mrr;
  emit(s.str());
  return outcome;
}

ParameterCount audit_parameters(const RunConfig& config) {
  validate_run_config(config);
  const fs::path dir(config.data_dir);
  if (!config.data_dir.empty() && fs::exists(dir / "train.txt")) {
    const KnowledgeGraph kg = load_configured_dataset(config);
    return count_parameters(model_config(config, static_cast<std::int64_t>(kg.num_entities()),
                                         static_cast<std::int64_t>(kg.num_relations())));
  }
  return count_parameters(model_config_from_stats(config));
}

void write_audit(std::ostream& out, const RunConfig& config, const ParameterCount& counts) {
  out << "dataset: " << config.dataset << "\n";
  out << "encoder: " << encoder_kind_name(config.encoder) << "\n";
  if (config.encoder == EncoderKind::kTgcn) {
    out << "layout: " << core_layout_name(config.layout) << "\n";
  } else {
    out << "scheme: " << weight_scheme_name(config.rgcn_scheme) << "\n";
  }
  out << "decoder: " << decoder_kind_name(config.decoder) << "\n";
  out << "nfp: " << counts.nfp << " (" << millions(counts.nfp) << ")\n";
  out << "efp: " << counts.efp << " (" << millions(counts.efp) << ")\n";
  out << "enfp: " << counts.enfp << " (" << millions(counts.enfp) << ")\n";
  if (config.encoder == EncoderKind::kRgcn) {
    out << "rgcn_loop: " << counts.rgcn_loop << " (" << millions(counts.rgcn_loop) << ")\n";
  }
}

std::map<std::string, std::string> read_records(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::map<std::string, std::string> records;
  std::string line;
  while (std::getline(in, line)) {
    const auto colon = line.find(": ");
    if (colon == std::string::npos) continue;
    records[line.substr(0, colon)] = line.substr(colon + 2);
  }
  return records;
}

RunConfig sweep_variant(const RunConfig& base, const std::string& key, const std::string& value,
                        const fs::path& run_dir) {
  RunConfig variant = base;
  if (key == "g_s" && value == "all") {
    variant.train.subgraph_size = std::numeric_limits<std::int64_t>::max();
  } else if (key == "n_b" || key == "g_s") {
    set_config_value(variant, key, value);
  } else {
    throw ConfigError("sweep key must be n_b or g_s, got '" + key + "'");
  }
  variant.out_dir = run_dir.string();
  validate_run_config(variant);
  return variant;
}

void write_sweep_table(std::ostream& out, const std::string& key, const std::vector<SweepRow>& rows) {
  const bool with_mrr = !rows.empty() && rows.front().mrr.has_value();
  const bool with_enfp = !rows.empty() && rows.front().enfp.has_value();
  out << "# " << key << (with_mrr ? "\tmrr" : "") << (with_enfp ? "\tenfp_m" : "") << "\n";
  for (const auto& row : rows) {
    out << row.value << std::fixed;
    if (with_mrr) out << "\t" << std::setprecision(4) << *row.mrr;
    if (with_enfp) out << "\t" << std::setprecision(3) << static_cast<double>(*row.enfp) / 1e6;
    out << "\n";
  }
}

int cmd_train(const TrainArgs& args, char** envp, std::ostream& out, std::ostream& err) {
  try {
    RunConfig config = load_with_env(args.config, envp);
    if (args.out) config.out_dir = args.out->string();
    if (args.seed) config.train.seed = *args.seed;
    run_training(config, out);
    return 0;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const Checkpoint ck = load_checkpoint(args.checkpoint);
    RunConfig config = ck.run_config();
    if (args.data_dir) config.data_dir = args.data_dir->string();
    const KnowledgeGraph kg = load_configured_dataset(config);
    if (!(kg.entities() == ck.entities) || !(kg.relations() == ck.relations)) {
      throw DatasetError("dataset vocabulary differs from the one stored in the checkpoint");
    }
    EvalOptions options;
    options.threads = args.threads;
    const Split split = parse_split(args.split);
    const RankingReport report = evaluate(ck.model, kg, split, args.seed, options);
    std::ostringstream text;
    write_report(text, report, {config.dataset, args.split, count_parameters(ck.model)});
    out << text.str();
    const fs::path path = args.out ? *args.out
                                   : args.checkpoint.parent_path() /
                                         ("report_" + args.split + "_" + std::to_string(args.seed) + ".txt");
    write_text(path, text.str());
    return 0;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

int cmd_audit(const fs::path& config_path, char** envp, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig config = load_with_env(config_path, envp);
    write_audit(out, config, audit_parameters(config));
    return 0;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

namespace {

// Children get the parent's environment minus TGCN_ overrides, which are
// already baked into each materialized config.
std::vector<char*> child_environment(char** envp) {
  std::vector<char*> env;
  for (char** e = envp; e != nullptr && *e != nullptr; ++e) {
    if (std::string_view(*e).substr(0, 5) != "TGCN_") env.push_back(*e);
  }
  env.push_back(nullptr);
  return env;
}

pid_t spawn_train(const fs::path& self, const fs::path& config, char** env) {
  std::string exe = self.string(), cmd = "train", flag = "--config", cfg = config.string();
  char* argv[] = {exe.data(), cmd.data(), flag.data(), cfg.data(), nullptr};
  const fs::path log = config.parent_path() / "stdout.txt";
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, 1, log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, 1, 2);
  pid_t pid = 0;
  const int rc = posix_spawn(&pid, exe.c_str(), &actions, nullptr, argv, env);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) throw std::runtime_error("cannot start " + exe);
  return pid;
}

}  // namespace

int cmd_sweep(const SweepArgs& args, char** envp, std::ostream& out, std::ostream& err) {
  try {
    if (args.key != "n_b" && args.key != "g_s") throw ConfigError("--key must be n_b or g_s");
    if (args.values.empty()) throw ConfigError("--values needs at least one value");
    const RunConfig base = load_with_env(args.config, envp);
    const fs::path root = args.out ? *args.out : fs::path(base.out_dir) / ("sweep_" + args.key);
    fs::create_directories(root);

    std::vector<RunConfig> variants;
    for (const auto& v : args.values) {
      variants.push_back(sweep_variant(base, args.key, v, root / (args.key + "_" + v)));
    }

    std::vector<SweepRow> rows(variants.size());
    for (std::size_t i = 0; i < variants.size(); ++i) {
      rows[i].value = args.values[i];
      if (args.key == "n_b") rows[i].enfp = audit_parameters(variants[i]).enfp;
    }
    if (!args.counts_only) {
      for (const auto& v : variants) {
        fs::create_directories(v.out_dir);
        write_text(fs::path(v.out_dir) / "config.cfg", serialize_run_config(v));
      }
      if (args.parallel <= 1) {
        for (const auto& v : variants) run_training(v, out);
      } else {
        std::vector<char*> env = child_environment(envp);
        std::size_t next = 0, running = 0;
        int failures = 0;
        while (next < variants.size() || running > 0) {
          while (running < args.parallel && next < variants.size()) {
            spawn_train(args.self, fs::path(variants[next].out_dir) / "config.cfg", env.data());
            ++next;
            ++running;
          }
          int status = 0;
          if (::wait(&status) > 0) {
            --running;
            if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) ++failures;
          }
        }
        if (failures > 0) throw std::runtime_error(std::to_string(failures) + " sweep run(s) failed; see stdout.txt");
      }
      for (std::size_t i = 0; i < variants.size(); ++i) {
        rows[i].mrr = std::stod(read_records(fs::path(variants[i].out_dir) / "metrics.txt").at("mrr"));
      }
    }
    std::ostringstream table;
    write_sweep_table(table, args.key, rows);
    out << table.str();
    write_text(root / ("sweep_" + args.key + ".tsv"), table.str());
    return 0;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

int cmd_synth(const SyntheticSpec& spec, const fs::path& dir, std::ostream& out, std::ostream& err) {
  try {
    const KnowledgeGraph kg = make_synthetic_kg(spec);
    write_dataset(kg, dir);
    out << "wrote " << kg.train().size() << "/" << kg.valid().size() << "/" << kg.test().size()
        << " train/valid/test triples over " << kg.num_entities() << " entities to " << dir.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

}  // namespace tgcn
