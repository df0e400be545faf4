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


#include "tgcn/config.hpp"

#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>
#include <type_traits>

namespace tgcn {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(std::string_view text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError("'" + std::string(text) + "' is not a valid number");
  return value;
}

bool parse_bool(std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("'" + std::string(text) + "' is not a boolean");
}

struct Field {
  ConfigKey key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;
};

template <typename T>
Field number_field(std::string_view name, std::string_view help, T RunConfig::*member) {
  return {{name, help},
          [member](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return format_double(c.*member);
            else return std::to_string(c.*member);
          },
          [member](RunConfig& c, std::string_view v) { c.*member = parse_number<T>(v); }};
}

template <typename T>
Field train_field(std::string_view name, std::string_view help, T TrainConfig::*member) {
  return {{name, help},
          [member](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return format_double(c.train.*member);
            else return std::to_string(c.train.*member);
          },
          [member](RunConfig& c, std::string_view v) { c.train.*member = parse_number<T>(v); }};
}

Field dropout_field(std::string_view name, std::string_view help, double DropoutRates::*member) {
  return {{name, help}, [member](const RunConfig& c) { return format_double(c.train.dropout.*member); },
          [member](RunConfig& c, std::string_view v) { c.train.dropout.*member = parse_number<double>(v); }};
}

Field string_field(std::string_view name, std::string_view help, std::string RunConfig::*member) {
  return {{name, help}, [member](const RunConfig& c) { return c.*member; },
          [member](RunConfig& c, std::string_view v) { c.*member = std::string(v); }};
}

template <typename E, typename Parse, typename Name>
Field enum_field(std::string_view name, std::string_view help, E RunConfig::*member, Parse parse, Name to_name) {
  return {{name, help}, [member, to_name](const RunConfig& c) { return std::string(to_name(c.*member)); },
          [member, parse](RunConfig& c, std::string_view v) {
            try {
              c.*member = parse(v);
            } catch (const std::exception& e) {
              throw ConfigError(e.what());
            }
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(string_field("dataset", "dataset label copied into reports", &RunConfig::dataset));
    f.push_back(string_field("data_dir", "directory holding train.txt, valid.txt, test.txt", &RunConfig::data_dir));
    f.push_back(number_field("num_entities", "entity count for audit without data files", &RunConfig::num_entities));
    f.push_back(number_field("num_relations", "raw relation count for audit without data files",
                             &RunConfig::num_relations));
    f.push_back({{"reciprocal", "add an inverse relation per relation"},
                 [](const RunConfig& c) { return std::string(c.reciprocal ? "true" : "false"); },
                 [](RunConfig& c, std::string_view v) { c.reciprocal = parse_bool(v); }});
    f.push_back(enum_field("encoder", "tgcn | rgcn", &RunConfig::encoder, parse_encoder_kind, encoder_kind_name));
    f.push_back(enum_field("layout", "TGCN core layout: dense | cp", &RunConfig::layout, parse_core_layout,
                           core_layout_name));
    f.push_back(enum_field("rgcn_scheme", "R-GCN weights: full | basis | block | cp", &RunConfig::rgcn_scheme,
                           parse_weight_scheme, weight_scheme_name));
    f.push_back(enum_field("decoder", "distmult | tucker", &RunConfig::decoder, parse_decoder_kind,
                           decoder_kind_name));
    f.push_back(number_field("dim", "entity embedding size", &RunConfig::dim));
    f.push_back(number_field("relation_dim", "relation embedding size", &RunConfig::relation_dim));
    f.push_back(number_field("num_layers", "encoder layers", &RunConfig::num_layers));
    f.push_back(number_field("n_b", "CP rank, or basis count for R-GCN basis", &RunConfig::num_bases));
    f.push_back(number_field("num_blocks", "blocks per R-GCN weight (block scheme)", &RunConfig::num_blocks));
    f.push_back(enum_field("hidden_activation", "relu | identity", &RunConfig::hidden_activation, parse_activation,
                           activation_name));
    f.push_back(enum_field("output_activation", "relu | identity", &RunConfig::output_activation, parse_activation,
                           activation_name));
    f.push_back({{"loss", "one_n | one_b"},
                 [](const RunConfig& c) { return std::string(loss_kind_name(c.train.loss)); },
                 [](RunConfig& c, std::string_view v) {
                   try {
                     c.train.loss = parse_loss_kind(v);
                   } catch (const std::exception& e) {
                     throw ConfigError(e.what());
                   }
                 }});
    f.push_back(train_field("tau", "NT-Xent temperature", &TrainConfig::temperature));
    f.push_back(train_field("lr", "initial learning rate", &TrainConfig::learning_rate));
    f.push_back(train_field("lr_decay", "step decay factor", &TrainConfig::lr_decay));
    f.push_back(train_field("lr_decay_period", "iterations per decay step", &TrainConfig::lr_decay_period));
    f.push_back(train_field("reg_f", "L2 factor on the embedding tables", &TrainConfig::reg_f));
    f.push_back(train_field("g_s", "triples sampled per iteration", &TrainConfig::subgraph_size));
    f.push_back(dropout_field("dr_i", "dropout on input embeddings", &DropoutRates::input));
    f.push_back(dropout_field("dr_h1", "dropout on layer 1 pre-activation", &DropoutRates::hidden1));
    f.push_back(dropout_field("dr_h2", "dropout on layer 2 pre-activation", &DropoutRates::hidden2));
    f.push_back(dropout_field("dr_o", "dropout on encoder output", &DropoutRates::output));
    f.push_back(dropout_field("dr_d", "dropout on the TuckER query", &DropoutRates::decoder));
    f.push_back(train_field("max_iterations", "training iterations", &TrainConfig::max_iterations));
    f.push_back(train_field("eval_period", "iterations between validations", &TrainConfig::eval_period));
    f.push_back(train_field("patience", "validations without improvement before stopping", &TrainConfig::patience));
    f.push_back(train_field("sub_batch", "queries per scoring chunk, 0 = whole batch", &TrainConfig::sub_batch));
    f.push_back(train_field("grad_clip", "global gradient norm clip, 0 = off", &TrainConfig::grad_clip));
    f.push_back(train_field("adam_beta1", "Adam first moment decay", &TrainConfig::adam_beta1));
    f.push_back(train_field("adam_beta2", "Adam second moment decay", &TrainConfig::adam_beta2));
    f.push_back(train_field("adam_epsilon", "Adam denominator offset", &TrainConfig::adam_epsilon));
    f.push_back(train_field("seed", "seed for init, sampling, dropout and tie breaking", &TrainConfig::seed));
    f.push_back(string_field("out_dir", "run output directory", &RunConfig::out_dir));
    f.push_back(number_field("eval_threads", "ranking threads during evaluation", &RunConfig::eval_threads));
    return f;
  }();
  return table;
}

const Field* find_field(std::string_view key) {
  for (const auto& f : fields()) {
    if (f.key.name == key) return &f;
  }
  return nullptr;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

std::string config_value(const RunConfig& config, std::string_view key) {
  const Field* f = find_field(key);
  if (f == nullptr) throw ConfigError("unknown key '" + std::string(key) + "'");
  return f->get(config);
}

void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
  const Field* f = find_field(key);
  if (f == nullptr) throw ConfigError("unknown key '" + std::string(key) + "'");
  try {
    f->set(config, value);
  } catch (const ConfigError& e) {
    throw ConfigError("key '" + std::string(key) + "': " + e.what());
  }
}

RunConfig parse_run_config(std::string_view text, std::string_view source_name) {
  RunConfig config;
  std::vector<std::string> problems;
  std::map<std::string, int> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_no) + ": ";
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      problems.push_back(where + "expected 'key = value'");
      continue;
    }
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (find_field(key) == nullptr) {
      problems.push_back(where + "unknown key '" + key + "'");
      continue;
    }
    if (auto [it, fresh] = seen.emplace(key, line_no); !fresh) {
      problems.push_back(where + "key '" + key + "' already set on line " + std::to_string(it->second));
      continue;
    }
    try {
      set_config_value(config, key, value);
    } catch (const ConfigError& e) {
      problems.push_back(where + e.what());
    }
  }
  if (problems.empty()) {
    try {
      validate_run_config(config);
    } catch (const ConfigError& e) {
      problems.push_back(std::string(source_name) + ": " + e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg;
    for (const auto& p : problems) msg += (msg.empty() ? "" : "\n") + p;
    throw ConfigError(msg);
  }
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.string());
}

std::vector<std::string> apply_env_overrides(RunConfig& config, char** envp) {
  std::vector<std::string> applied;
  if (envp == nullptr) return applied;
  constexpr std::string_view prefix = "TGCN_";
  for (char** e = envp; *e != nullptr; ++e) {
    const std::string_view entry(*e);
    if (entry.substr(0, prefix.size()) != prefix) continue;
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    std::string key;
    const std::string_view raw = entry.substr(prefix.size(), eq - prefix.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw.substr(i, 2) == "__") {
        key += '.';
        ++i;
      } else {
        key += static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i])));
      }
    }
    if (find_field(key) == nullptr) throw ConfigError("environment: unknown key '" + key + "' from " + std::string(raw));
    set_config_value(config, key, trim(entry.substr(eq + 1)));
    applied.push_back(key);
  }
  if (!applied.empty()) validate_run_config(config);
  return applied;
}

std::string serialize_run_config(const RunConfig& config) {
  std::string out;
  for (const auto& f : fields()) {
    out += std::string(f.key.name) + " = " + f.get(config) + "\n";
  }
  return out;
}

void validate_run_config(const RunConfig& config) {
  std::vector<std::string> bad;
  if (config.dim < 1) bad.push_back("dim must be >= 1");
  if (config.relation_dim < 1) bad.push_back("relation_dim must be >= 1");
  if (config.num_layers < 1) bad.push_back("num_layers must be >= 1");
  if (config.num_bases < 1) bad.push_back("n_b must be >= 1");
  if (config.num_blocks < 1) bad.push_back("num_blocks must be >= 1");
  if (config.num_entities < 0) bad.push_back("num_entities must be >= 0");
  if (config.num_relations < 0) bad.push_back("num_relations must be >= 0");
  if (config.eval_threads < 1) bad.push_back("eval_threads must be >= 1");
  if (config.decoder == DecoderKind::kDistMult && config.dim != config.relation_dim) {
    bad.push_back("relation_dim must equal dim for the distmult decoder");
  }
  if (config.encoder == EncoderKind::kRgcn && config.rgcn_scheme == WeightScheme::kBlock &&
      config.dim % config.num_blocks != 0) {
    bad.push_back("num_blocks must divide dim for the block scheme");
  }
  try {
    config.train.validate();
  } catch (const ConfigError& e) {
    bad.push_back(e.what());
  }
  if (!bad.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& b : bad) msg += "\n  " + b;
    throw ConfigError(msg);
  }
}

ModelConfig model_config(const RunConfig& config, std::int64_t num_entities, std::int64_t num_relations) {
  ModelConfig m;
  m.encoder = config.encoder;
  m.layout = config.layout;
  m.rgcn_scheme = config.rgcn_scheme;
  m.decoder = config.decoder;
  m.num_entities = num_entities;
  m.num_relations = num_relations;
  m.entity_dim = config.dim;
  m.relation_dim = config.relation_dim;
  m.num_layers = config.num_layers;
  m.num_bases = config.num_bases;
  m.num_blocks = config.num_blocks;
  m.hidden_activation = config.hidden_activation;
  m.output_activation = config.output_activation;
  m.validate();
  return m;
}

ModelConfig model_config_from_stats(const RunConfig& config) {
  if (config.num_entities < 1 || config.num_relations < 1) {
    throw ConfigError("keys 'num_entities' and 'num_relations' must be set when no data files are available");
  }
  const std::int64_t relations = config.reciprocal ? 2 * config.num_relations : config.num_relations;
  return model_config(config, config.num_entities, relations);
}

}  // namespace tgcn
