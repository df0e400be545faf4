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


// Small graphs and objectives shared by the training tests and the
// acceptance binary.

#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "tgcn/message_graph.hpp"
#include "tgcn/training.hpp"

namespace tgcn::testing {

// 6 entities, 3 relations; ids used directly by the model.
inline std::vector<Triple> tiny_batch() {
  return {{0, 0, 1}, {1, 1, 2}, {2, 2, 3}, {3, 0, 4}, {4, 1, 5}, {5, 2, 0}, {1, 0, 3}, {2, 1, 4}, {0, 2, 5}};
}

inline ModelConfig tiny_model_config(EncoderKind encoder, CoreLayout layout, WeightScheme scheme,
                                     DecoderKind decoder) {
  ModelConfig c;
  c.encoder = encoder;
  c.layout = layout;
  c.rgcn_scheme = scheme;
  c.decoder = decoder;
  c.num_entities = 6;
  c.num_relations = 3;
  c.entity_dim = 4;
  c.relation_dim = 4;
  c.num_bases = 3;
  c.num_blocks = 2;
  return c;
}

inline Objective batch_objective_fn(const std::vector<Triple>& batch, const TrainConfig& config) {
  return [batch, config](const Model<double>& model, Model<double>* grads) {
    Rng rng(0);  // unused with zero dropout
    return batch_objective(model, std::span<const Triple>(batch), config, true, &rng, grads);
  };
}

// Smallest |pre-activation| over the ReLU layers, for both graph builds.
inline double relu_margin(const Model<double>& model, const std::vector<Triple>& batch) {
  double margin = std::numeric_limits<double>::infinity();
  const auto n = static_cast<std::size_t>(model.config.num_entities);
  for (const auto& graph : {MessageGraph::over_all_entities(batch, n),
                            MessageGraph::over_active_entities(Subgraph::from_triples(batch), n)}) {
    EncoderTape<double> tape;
    encode(model, graph, DropoutRates{}, false, nullptr, &tape);
    for (std::size_t l = 0; l < tape.layers.size(); ++l)
      if (model.layers[l].activation == Activation::kRelu) margin = std::min(margin, tape.layers[l].pre.cwiseAbs().minCoeff());
    for (std::size_t l = 0; l < tape.rgcn_layers.size(); ++l)
      if (model.rgcn_layers[l].activation == Activation::kRelu)
        margin = std::min(margin, tape.rgcn_layers[l].pre.cwiseAbs().minCoeff());
  }
  return margin;
}

// Central differences are only meaningful away from ReLU kinks, so draws whose
// pre-activations come within `margin` of zero are skipped.
inline Model<double> gradient_check_model(const ModelConfig& config, std::uint64_t seed,
                                          const std::vector<Triple>& batch = tiny_batch(), double margin = 1e-3) {
  for (std::uint64_t s = seed;; s += 1000) {
    Rng rng(s);
    auto model = Model<double>::initialized(config, rng);
    if (relu_margin(model, batch) > margin) return model;
  }
}

}  // namespace tgcn::testing
