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

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tgcn/kgdata.hpp"
#include "tgcn/losses.hpp"
#include "tgcn/model.hpp"

namespace tgcn {

enum class LossKind { kOneN, kOneB };

LossKind parse_loss_kind(std::string_view name);
std::string_view loss_kind_name(LossKind kind);

struct TrainConfig {
  LossKind loss = LossKind::kOneN;
  double temperature = 1.0;  // tau, 1-b only
  double learning_rate = 0.005;
  double lr_decay = 0.95;
  std::int64_t lr_decay_period = 500;
  double reg_f = 0.01;
  std::int64_t subgraph_size = 90000;  // g_s
  DropoutRates dropout;
  std::int64_t max_iterations = 50000;
  std::int64_t eval_period = 500;
  std::int64_t patience = 20;  // evaluations without validation improvement
  std::int64_t sub_batch = 0;  // queries scored per chunk; 0 = whole batch at once
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double grad_clip = 0.0;  // global L2 norm clip, 0 = off
  std::uint64_t seed = 1;

  void validate() const;
};

/// Step-decayed learning rate: lr * decay^floor(iteration / period).
double lr_at(std::int64_t iteration, const TrainConfig& config);

/// Instrumentation for one objective evaluation.
struct BatchStats {
  std::uint64_t score_evaluations = 0;  // entries of every score matrix computed
  std::size_t batch_size = 0;
  std::size_t num_candidates = 0;       // |V| for 1-N, |unique batch entities| for 1-b
  std::size_t num_nodes = 0;
};

/// Loss (+ L2 penalty) of `batch` under the configured loss. The batch doubles
/// as the message-passing graph. With `grads` non-null, gradients are
/// accumulated into it.
template <typename Real>
double batch_objective(const Model<Real>& model, std::span<const Triple> batch, const TrainConfig& config,
                       bool training, Rng* rng, Model<Real>* grads, BatchStats* stats = nullptr);

template <typename Real>
class AdamOptimizer {
 public:
  AdamOptimizer(const Model<Real>& shape, double beta1, double beta2, double epsilon);

  void step(Model<Real>& params, const Model<Real>& grads, double learning_rate);
  std::int64_t steps() const { return steps_; }

 private:
  Model<Real> first_;
  Model<Real> second_;
  double beta1_;
  double beta2_;
  double epsilon_;
  std::int64_t steps_ = 0;
};

struct StepResult {
  double loss = 0.0;
  double learning_rate = 0.0;
  BatchStats stats;
};

/// Samples a subgraph of g_s training triples, evaluates the objective on it and
/// applies one Adam update at lr_at(iteration).
template <typename Real>
StepResult train_step(Model<Real>& model, AdamOptimizer<Real>& optimizer, const KnowledgeGraph& kg,
                      const TrainConfig& config, std::int64_t iteration, Rng& rng);

struct EvalPoint {
  std::int64_t iteration = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;  // mean over the steps since the previous evaluation
  double valid_mrr = 0.0;
};

struct FitResult {
  std::vector<EvalPoint> history;
  double best_valid_mrr = 0.0;
  std::int64_t best_iteration = 0;
  std::int64_t iterations_run = 0;
  bool stopped_early = false;
  Model<float> best_model;
};

struct FitCallbacks {
  std::function<void(const EvalPoint&)> on_eval;                       // after each validation
  std::function<void(const Model<float>&, const EvalPoint&)> on_best;  // new best validation MRR
};

/// Training loop with periodic validation and early stopping on validation MRR.
/// Single-threaded and fully determined by config.seed.
FitResult fit(Model<float>& model, const KnowledgeGraph& kg, const TrainConfig& config,
              const FitCallbacks& callbacks = {});

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  Eigen::Index worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t entries_checked = 0;
};

/// Objective over a 64-bit model; fills `grads` when non-null.
using Objective = std::function<double(const Model<double>&, Model<double>*)>;

/// Central finite differences against analytic gradients, entry by entry.
/// Relative error is |a - n| / max(|a|, |n|, floor). `include` selects
/// parameters by name (all when empty).
GradientCheckResult gradient_check(const Model<double>& model, const Objective& objective,
                                   double step = 1e-4, double floor = 1e-5,
                                   const std::function<bool(const std::string&)>& include = {});

}  // namespace tgcn
