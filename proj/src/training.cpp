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

#include "tgcn/training.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tgcn/evaluation.hpp"
#include "tgcn/message_graph.hpp"

namespace tgcn {

using Eigen::Index;

LossKind parse_loss_kind(std::string_view name) {
  if (name == "one_n" || name == "1-n") return LossKind::kOneN;
  if (name == "one_b" || name == "1-b") return LossKind::kOneB;
  throw ArgumentError("unknown loss '" + std::string(name) + "' (expected one_n or one_b)");
}

std::string_view loss_kind_name(LossKind kind) { return kind == LossKind::kOneB ? "one_b" : "one_n"; }

void TrainConfig::validate() const {
  std::ostringstream err;
  auto rate_ok = [](double r) { return r >= 0.0 && r < 1.0; };
  if (!(temperature > 0.0)) err << "tau must be > 0; ";
  if (!(learning_rate > 0.0)) err << "lr must be > 0; ";
  if (!(lr_decay > 0.0)) err << "lr_decay must be > 0; ";
  if (lr_decay_period < 1) err << "lr_decay_period must be >= 1; ";
  if (reg_f < 0.0) err << "reg_f must be >= 0; ";
  if (subgraph_size < 1) err << "g_s must be >= 1; ";
  if (!rate_ok(dropout.input) || !rate_ok(dropout.hidden1) || !rate_ok(dropout.hidden2) ||
      !rate_ok(dropout.output) || !rate_ok(dropout.decoder)) {
    err << "dropout rates must lie in [0, 1); ";
  }
  if (max_iterations < 0) err << "max_iterations must be >= 0; ";
  if (eval_period < 1) err << "eval_period must be >= 1; ";
  if (patience < 1) err << "patience must be >= 1; ";
  if (sub_batch < 0) err << "sub_batch must be >= 0; ";
  if (!err.str().empty()) throw ConfigError("invalid training configuration: " + err.str());
}

double lr_at(std::int64_t iteration, const TrainConfig& config) {
  if (iteration < 0) throw ArgumentError("iteration must be >= 0");
  const auto steps = iteration / config.lr_decay_period;
  return config.learning_rate * std::pow(config.lr_decay, static_cast<double>(steps));
}

template <typename Real>
double batch_objective(const Model<Real>& model, std::span<const Triple> batch, const TrainConfig& config,
                       bool training, Rng* rng, Model<Real>* grads, BatchStats* stats) {
  const auto num_entities = static_cast<std::size_t>(model.config.num_entities);
  MessageGraph graph;
  if (config.loss == LossKind::kOneN) {
    graph = MessageGraph::over_all_entities(batch, num_entities);
  } else {
    graph = MessageGraph::over_active_entities(Subgraph::from_triples({batch.begin(), batch.end()}), num_entities);
  }

  EncoderTape<Real> encoder_tape;
  const Matrix<Real> reps = encode(model, graph, config.dropout, training, rng, grads ? &encoder_tape : nullptr);

  std::vector<DecoderQuery> queries;
  std::vector<Index> targets;
  queries.reserve(batch.size());
  targets.reserve(batch.size());
  for (const Triple& t : batch) {
    queries.push_back({graph.local(t.source), t.relation});
    targets.push_back(graph.local(t.target));
  }

  const std::size_t chunk = config.sub_batch > 0 ? static_cast<std::size_t>(config.sub_batch) : std::max<std::size_t>(1, batch.size());
  const double chunk_norm_base = 1.0 / static_cast<double>(std::max<std::size_t>(1, batch.size()));
  Matrix<Real> grad_reps;
  if (grads != nullptr) grad_reps = Matrix<Real>::Zero(reps.rows(), reps.cols());

  double loss = 0.0;
  for (std::size_t begin = 0; begin < batch.size(); begin += chunk) {
    const std::size_t end = std::min(batch.size(), begin + chunk);
    const std::span<const DecoderQuery> part(queries.data() + begin, end - begin);
    const std::span<const Index> part_targets(targets.data() + begin, end - begin);
    DecoderTape<Real> tape;
    const Matrix<Real> q = query_vectors(model.decoder, reps, part, model.tables.relation, config.dropout.decoder,
                                         training, rng, grads ? &tape : nullptr);
    const Matrix<Real> scores = q * reps.transpose();
    if (stats != nullptr) stats->score_evaluations += static_cast<std::uint64_t>(scores.size());

    LossResult<Real> result = config.loss == LossKind::kOneN
                                  ? bce_1n_loss<Real>(scores, part_targets)
                                  : nt_xent_1b_loss<Real>(scores, part_targets, config.temperature);
    // Each chunk's loss is a mean over its rows; reweight to a mean over the batch.
    const double weight = static_cast<double>(end - begin) * chunk_norm_base;
    loss += result.value * weight;
    if (grads != nullptr) {
      result.grad *= static_cast<Real>(weight);
      grad_reps.noalias() += result.grad.transpose() * q;
      const Matrix<Real> grad_q = result.grad * reps;
      query_vectors_backward(model.decoder, reps, part, model.tables.relation, tape, grad_q, grads->decoder,
                             grad_reps, grads->tables.relation);
    }
  }

  loss += embedding_l2_penalty(model.tables, config.reg_f, grads ? &grads->tables : nullptr);
  if (grads != nullptr) encode_backward(model, graph, encoder_tape, std::move(grad_reps), *grads);
  if (stats != nullptr) {
    stats->batch_size = batch.size();
    stats->num_candidates = static_cast<std::size_t>(reps.rows());
    stats->num_nodes = static_cast<std::size_t>(graph.num_nodes());
  }
  return loss;
}

// ---------------------------------------------------------------------------
// Adam

template <typename Real>
AdamOptimizer<Real>::AdamOptimizer(const Model<Real>& shape, double beta1, double beta2, double epsilon)
    : first_(shape.zeros_like()), second_(shape.zeros_like()), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

template <typename Real>
void AdamOptimizer<Real>::step(Model<Real>& params, const Model<Real>& grads, double learning_rate) {
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  std::vector<Matrix<Real>*> p, m, v;
  std::vector<const Matrix<Real>*> g;
  params.visit([&p](const std::string&, Matrix<Real>& x) { p.push_back(&x); });
  first_.visit([&m](const std::string&, Matrix<Real>& x) { m.push_back(&x); });
  second_.visit([&v](const std::string&, Matrix<Real>& x) { v.push_back(&x); });
  grads.visit([&g](const std::string&, const Matrix<Real>& x) { g.push_back(&x); });
  const auto b1 = static_cast<Real>(beta1_), b2 = static_cast<Real>(beta2_);
  const auto step_size = static_cast<Real>(learning_rate / c1);
  const auto inv_c2 = static_cast<Real>(1.0 / c2);
  const auto eps = static_cast<Real>(epsilon_);
  for (std::size_t i = 0; i < p.size(); ++i) {
    m[i]->array() = b1 * m[i]->array() + (Real(1) - b1) * g[i]->array();
    v[i]->array() = b2 * v[i]->array() + (Real(1) - b2) * g[i]->array().square();
    p[i]->array() -= step_size * m[i]->array() / ((v[i]->array() * inv_c2).sqrt() + eps);
  }
}

template <typename Real>
StepResult train_step(Model<Real>& model, AdamOptimizer<Real>& optimizer, const KnowledgeGraph& kg,
                      const TrainConfig& config, std::int64_t iteration, Rng& rng) {
  const Subgraph sub = sample_subgraph(kg, static_cast<std::size_t>(config.subgraph_size), rng);
  Model<Real> grads = model.zeros_like();
  StepResult result;
  result.loss = batch_objective(model, std::span<const Triple>(sub.triples), config, true, &rng, &grads, &result.stats);
  if (config.grad_clip > 0.0) {
    double sq = 0.0;
    grads.visit([&sq](const std::string&, const Matrix<Real>& m) { sq += static_cast<double>(m.squaredNorm()); });
    const double norm = std::sqrt(sq);
    if (norm > config.grad_clip) {
      const auto scale = static_cast<Real>(config.grad_clip / norm);
      grads.visit([scale](const std::string&, Matrix<Real>& m) { m *= scale; });
    }
  }
  result.learning_rate = lr_at(iteration, config);
  optimizer.step(model, grads, result.learning_rate);
  return result;
}

FitResult fit(Model<float>& model, const KnowledgeGraph& kg, const TrainConfig& config,
              const FitCallbacks& callbacks) {
  config.validate();
  if (!kg.augmented()) throw StateError("training expects a graph augmented with reciprocal relations");
  Rng rng(config.seed);
  AdamOptimizer<float> optimizer(model, config.adam_beta1, config.adam_beta2, config.adam_epsilon);
  FitResult result;
  result.best_model = model;
  result.best_valid_mrr = -1.0;
  std::int64_t since_best = 0;
  double loss_sum = 0.0;
  std::int64_t loss_count = 0;

  auto validate_now = [&](std::int64_t iteration) {
    EvalPoint point;
    point.iteration = iteration;
    point.learning_rate = lr_at(std::max<std::int64_t>(0, iteration - 1), config);
    point.train_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
    point.valid_mrr = evaluate(model, kg, Split::kValid, config.seed).mrr;
    loss_sum = 0.0;
    loss_count = 0;
    result.history.push_back(point);
    if (callbacks.on_eval) callbacks.on_eval(point);
    if (point.valid_mrr > result.best_valid_mrr) {
      result.best_valid_mrr = point.valid_mrr;
      result.best_iteration = iteration;
      result.best_model = model;
      since_best = 0;
      if (callbacks.on_best) callbacks.on_best(model, point);
    } else {
      ++since_best;
    }
  };

  for (std::int64_t it = 0; it < config.max_iterations; ++it) {
    const StepResult step = train_step(model, optimizer, kg, config, it, rng);
    if (!std::isfinite(step.loss)) {
      std::ostringstream msg;
      msg << "training diverged at iteration " << it << " (loss " << step.loss << ")";
      throw std::runtime_error(msg.str());
    }
    loss_sum += step.loss;
    ++loss_count;
    result.iterations_run = it + 1;
    if ((it + 1) % config.eval_period == 0) {
      validate_now(it + 1);
      if (since_best >= config.patience) {
        result.stopped_early = true;
        break;
      }
    }
  }
  if (result.history.empty() || result.history.back().iteration != result.iterations_run) {
    validate_now(result.iterations_run);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Gradient verification

GradientCheckResult gradient_check(const Model<double>& model, const Objective& objective, double step,
                                   double floor, const std::function<bool(const std::string&)>& include) {
  Model<double> analytic = model.zeros_like();
  objective(model, &analytic);
  std::vector<const Matrix<double>*> analytic_arrays;
  analytic.visit([&](const std::string&, const Matrix<double>& m) { analytic_arrays.push_back(&m); });

  Model<double> probe = model;
  GradientCheckResult result;
  std::size_t index = 0;
  probe.visit([&](const std::string& name, Matrix<double>& values) {
    const Matrix<double>& grad = *analytic_arrays[index++];
    if (include && !include(name)) return;
    for (Index i = 0; i < values.size(); ++i) {
      const double original = values.data()[i];
      values.data()[i] = original + step;
      const double plus = objective(probe, nullptr);
      values.data()[i] = original - step;
      const double minus = objective(probe, nullptr);
      values.data()[i] = original;
      const double numeric = (plus - minus) / (2.0 * step);
      const double a = grad.data()[i];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
      ++result.entries_checked;
      if (rel > result.max_relative_error) {
        result.max_relative_error = rel;
        result.worst_parameter = name;
        result.worst_index = i;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  });
  return result;
}

#define TGCN_INSTANTIATE(Real)                                                                        \
  template double batch_objective(const Model<Real>&, std::span<const Triple>, const TrainConfig&,    \
                                  bool, Rng*, Model<Real>*, BatchStats*);                             \
  template class AdamOptimizer<Real>;                                                                 \
  template StepResult train_step(Model<Real>&, AdamOptimizer<Real>&, const KnowledgeGraph&,           \
                                 const TrainConfig&, std::int64_t, Rng&);

TGCN_INSTANTIATE(float)
TGCN_INSTANTIATE(double)

#undef TGCN_INSTANTIATE

}  // namespace tgcn
