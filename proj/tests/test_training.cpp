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


#include <gtest/gtest.h>

#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tgcn/synthetic.hpp"
#include "tgcn/training.hpp"

namespace tgcn {
namespace {

KnowledgeGraph toy_kg(std::uint64_t seed = 3) {
  SyntheticSpec spec;
  spec.num_entities = 12;
  spec.num_relations = 2;
  spec.cluster_size = 3;
  spec.density = 0.9;
  spec.valid_fraction = 0.1;
  spec.test_fraction = 0.1;
  spec.seed = seed;
  return add_reciprocals(make_synthetic_kg(spec));
}

ModelConfig toy_model(const KnowledgeGraph& kg) {
  ModelConfig c;
  c.num_entities = static_cast<std::int64_t>(kg.num_entities());
  c.num_relations = static_cast<std::int64_t>(kg.num_relations());
  c.entity_dim = c.relation_dim = 8;
  c.layout = CoreLayout::kCp;
  c.num_bases = 4;
  return c;
}

TEST(LearningRate, StepDecay) {
  TrainConfig c;
  c.learning_rate = 0.005;
  EXPECT_DOUBLE_EQ(lr_at(0, c), 0.005);
  EXPECT_DOUBLE_EQ(lr_at(499, c), 0.005);
  EXPECT_NEAR(lr_at(500, c), 0.00475, 1e-15);
  EXPECT_NEAR(lr_at(1250, c), 0.005 * 0.9025, 1e-15);
  EXPECT_THROW(lr_at(-1, c), ArgumentError);
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.temperature = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.dropout.hidden2 = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.subgraph_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(parse_loss_kind(loss_kind_name(LossKind::kOneB)), LossKind::kOneB);
  EXPECT_THROW(parse_loss_kind("margin"), ArgumentError);
}

struct Combo {
  EncoderKind encoder;
  int variant;  // core layout for TGCN, weight scheme for R-GCN
  DecoderKind decoder;
  LossKind loss;
};

std::string combo_name(const ::testing::TestParamInfo<Combo>& info) {
  const Combo& c = info.param;
  std::string name(encoder_kind_name(c.encoder));
  name += c.encoder == EncoderKind::kTgcn ? std::string(core_layout_name(static_cast<CoreLayout>(c.variant)))
                                          : std::string(weight_scheme_name(static_cast<WeightScheme>(c.variant)));
  name += std::string(decoder_kind_name(c.decoder)) + std::string(loss_kind_name(c.loss));
  name.erase(std::remove(name.begin(), name.end(), '_'), name.end());
  return name;
}

class GradientCheck : public ::testing::TestWithParam<Combo> {};

TEST_P(GradientCheck, AnalyticMatchesFiniteDifferences) {
  const Combo& c = GetParam();
  const auto config = testing::tiny_model_config(c.encoder, static_cast<CoreLayout>(c.variant),
                                                 static_cast<WeightScheme>(c.variant), c.decoder);
  TrainConfig train;
  train.loss = c.loss;
  train.temperature = 0.7;
  train.reg_f = 0.01;
  const auto model = testing::gradient_check_model(config, 11);
  const auto result = gradient_check(model, testing::batch_objective_fn(testing::tiny_batch(), train));
  EXPECT_LT(result.max_relative_error, 1e-4) << result.worst_parameter << "[" << result.worst_index << "]";
  EXPECT_GT(result.entries_checked, 100u);
}

std::vector<Combo> all_combos() {
  std::vector<Combo> out;
  for (auto dec : {DecoderKind::kDistMult, DecoderKind::kTucker})
    for (auto loss : {LossKind::kOneN, LossKind::kOneB}) {
      for (int layout = 0; layout < 2; ++layout) out.push_back({EncoderKind::kTgcn, layout, dec, loss});
      for (int scheme = 0; scheme < 4; ++scheme) out.push_back({EncoderKind::kRgcn, scheme, dec, loss});
    }
  return out;
}

INSTANTIATE_TEST_SUITE_P(AllModels, GradientCheck, ::testing::ValuesIn(all_combos()), combo_name);

TEST(GradientCheckHarness, HoldsAcrossSeeds) {
  for (LossKind loss : {LossKind::kOneN, LossKind::kOneB}) {
    const auto config =
        testing::tiny_model_config(EncoderKind::kTgcn, CoreLayout::kDense, WeightScheme::kFull, DecoderKind::kDistMult);
    TrainConfig train;
    train.loss = loss;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const auto model = testing::gradient_check_model(config, seed);
      EXPECT_GT(testing::relu_margin(model, testing::tiny_batch()), 1e-3);
      const auto result = gradient_check(model, testing::batch_objective_fn(testing::tiny_batch(), train));
      EXPECT_LT(result.max_relative_error, 1e-4) << seed << " " << result.worst_parameter;
    }
  }
}

TEST(GradientCheckHarness, DecoderOnlyIsNearExact) {
  const auto config =
      testing::tiny_model_config(EncoderKind::kTgcn, CoreLayout::kDense, WeightScheme::kFull, DecoderKind::kTucker);
  TrainConfig train;
  train.reg_f = 0.0;
  const auto model = testing::gradient_check_model(config, 12);
  const auto result = gradient_check(model, testing::batch_objective_fn(testing::tiny_batch(), train), 1e-4, 1e-5,
                                     [](const std::string& name) { return name == "decoder.core"; });
  EXPECT_LT(result.max_relative_error, 1e-6);
  EXPECT_EQ(result.entries_checked, 64u);
}

TEST(GradientCheckHarness, DetectsAWrongGradient) {
  const auto config =
      testing::tiny_model_config(EncoderKind::kTgcn, CoreLayout::kCp, WeightScheme::kFull, DecoderKind::kDistMult);
  TrainConfig train;
  const auto inner = testing::batch_objective_fn(testing::tiny_batch(), train);
  const Objective broken = [&](const Model<double>& m, Model<double>* g) {
    const double v = inner(m, g);
    if (g != nullptr) g->tables.relation *= 1.5;
    return v;
  };
  const auto result = gradient_check(testing::gradient_check_model(config, 13), broken);
  EXPECT_GT(result.max_relative_error, 0.1);
  EXPECT_EQ(result.worst_parameter, "relation");
}

TEST(GradientCheckHarness, PartialBatchOverActiveEntities) {
  const auto config =
      testing::tiny_model_config(EncoderKind::kTgcn, CoreLayout::kCp, WeightScheme::kFull, DecoderKind::kTucker);
  TrainConfig train;
  train.loss = LossKind::kOneB;
  const std::vector<Triple> batch{{0, 0, 1}, {1, 2, 3}, {3, 1, 0}};
  const auto result =
      gradient_check(testing::gradient_check_model(config, 14, batch), testing::batch_objective_fn(batch, train));
  EXPECT_LT(result.max_relative_error, 1e-4);
}

TEST(BatchObjective, SubBatchChunksGiveSameLossAndGradient) {
  for (LossKind loss : {LossKind::kOneN, LossKind::kOneB}) {
    const auto config =
        testing::tiny_model_config(EncoderKind::kTgcn, CoreLayout::kDense, WeightScheme::kFull, DecoderKind::kTucker);
    const auto model = testing::gradient_check_model(config, 15);
    TrainConfig whole;
    whole.loss = loss;
    TrainConfig chunked = whole;
    chunked.sub_batch = 2;
    const auto batch = testing::tiny_batch();
    auto g1 = model.zeros_like(), g2 = model.zeros_like();
    Rng rng(0);
    const double a = batch_objective(model, std::span<const Triple>(batch), whole, false, &rng, &g1);
    const double b = batch_objective(model, std::span<const Triple>(batch), chunked, false, &rng, &g2);
    EXPECT_NEAR(a, b, 1e-12);
    std::vector<Matrix<double>> x, y;
    g1.visit([&](const std::string&, const Matrix<double>& m) { x.push_back(m); });
    g2.visit([&](const std::string&, const Matrix<double>& m) { y.push_back(m); });
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_LT((x[i] - y[i]).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(BatchObjective, OneBScoresOnlyBatchEntities) {
  ModelConfig c = testing::tiny_model_config(EncoderKind::kTgcn, CoreLayout::kCp, WeightScheme::kFull,
                                             DecoderKind::kDistMult);
  c.num_entities = 50;
  Rng rng(16);
  const auto model = Model<float>::initialized(c, rng);
  const std::vector<Triple> batch{{0, 0, 1}, {1, 1, 2}, {7, 2, 1}, {2, 0, 9}};
  TrainConfig train;
  train.loss = LossKind::kOneB;
  BatchStats stats;
  batch_objective(model, std::span<const Triple>(batch), train, true, &rng, static_cast<Model<float>*>(nullptr), &stats);
  EXPECT_EQ(stats.num_candidates, 5u);  // {0, 1, 2, 7, 9}
  EXPECT_EQ(stats.score_evaluations, 4u * 5u);
  train.loss = LossKind::kOneN;
  BatchStats full;
  batch_objective(model, std::span<const Triple>(batch), train, true, &rng, static_cast<Model<float>*>(nullptr), &full);
  EXPECT_EQ(full.score_evaluations, 4u * 50u);
}

TEST(Adam, FirstStepMovesByLearningRateTimesSign) {
  ModelConfig c = testing::tiny_model_config(EncoderKind::kTgcn, CoreLayout::kCp, WeightScheme::kFull,
                                             DecoderKind::kDistMult);
  auto params = Model<double>::zeros(c);
  auto grads = params.zeros_like();
  grads.tables.entity.setConstant(-3.0);
  grads.tables.relation.setConstant(0.25);
  AdamOptimizer<double> adam(params, 0.9, 0.999, 1e-8);
  adam.step(params, grads, 0.01);
  EXPECT_EQ(adam.steps(), 1);
  EXPECT_NEAR(params.tables.entity(0, 0), 0.01, 1e-8);
  EXPECT_NEAR(params.tables.relation(1, 1), -0.01, 1e-8);
  EXPECT_EQ(params.layers[0].loop_weight.cwiseAbs().maxCoeff(), 0.0);
}

TEST(TrainStep, SameSeedSameLossSequence) {
  const KnowledgeGraph kg = toy_kg();
  TrainConfig train;
  train.loss = LossKind::kOneB;
  train.subgraph_size = 20;
  train.dropout = {0.1, 0.1, 0.1, 0.1, 0.1};
  auto run = [&] {
    Rng rng(5);
    auto model = Model<float>::initialized(toy_model(kg), rng);
    AdamOptimizer<float> adam(model, 0.9, 0.999, 1e-8);
    std::vector<double> losses;
    for (int it = 0; it < 15; ++it) losses.push_back(train_step(model, adam, kg, train, it, rng).loss);
    return losses;
  };
  EXPECT_EQ(run(), run());
}

TEST(TrainStep, LossDecreasesOnToyGraph) {
  Vocabulary e, r;
  std::vector<Triple> triples;
  for (int i = 0; i < 10; ++i) {
    const auto a = e.intern("n" + std::to_string(i)), b = e.intern("n" + std::to_string((i + 1) % 10)),
               c = e.intern("n" + std::to_string((i + 3) % 10));
    triples.push_back({a, r.intern("next"), b});
    triples.push_back({a, r.intern("skip"), c});
  }
  const KnowledgeGraph kg = add_reciprocals(KnowledgeGraph(e, r, triples, {}, {}));
  ModelConfig c = toy_model(kg);
  TrainConfig train;
  train.loss = LossKind::kOneN;
  train.subgraph_size = 20;
  train.learning_rate = 0.01;
  train.reg_f = 0.0;
  Rng rng(6);
  auto model = Model<float>::initialized(c, rng);
  AdamOptimizer<float> adam(model, 0.9, 0.999, 1e-8);
  const double first = train_step(model, adam, kg, train, 0, rng).loss;
  double last = first;
  for (int it = 1; it < 50; ++it) last = train_step(model, adam, kg, train, it, rng).loss;
  EXPECT_LT(last, first);
}

TEST(TrainStep, InverseTriplesAreSampledIndependently) {
  const KnowledgeGraph kg = toy_kg();
  Rng rng(7);
  bool saw_unpaired = false;
  for (int draw = 0; draw < 50 && !saw_unpaired; ++draw) {
    const Subgraph sub = sample_subgraph(kg, 10, rng);
    const std::set<Triple> chosen(sub.triples.begin(), sub.triples.end());
    for (const Triple& t : sub.triples) {
      if (!chosen.count({t.target, kg.inverse(t.relation), t.source})) saw_unpaired = true;
    }
  }
  EXPECT_TRUE(saw_unpaired);
}

TEST(Fit, StopsWhenValidationStalls) {
  const KnowledgeGraph kg = toy_kg();
  TrainConfig train;
  train.learning_rate = 1e-12;
  train.subgraph_size = 10;
  train.max_iterations = 100;
  train.eval_period = 5;
  train.patience = 1;
  Rng rng(8);
  auto model = Model<float>::initialized(toy_model(kg), rng);
  std::vector<std::int64_t> seen;
  FitCallbacks cb;
  cb.on_eval = [&](const EvalPoint& p) { seen.push_back(p.iteration); };
  const FitResult result = fit(model, kg, train, cb);
  EXPECT_TRUE(result.stopped_early);
  EXPECT_EQ(result.iterations_run, 10);
  EXPECT_EQ(seen, (std::vector<std::int64_t>{5, 10}));
  EXPECT_EQ(result.best_iteration, 5);
}

TEST(Fit, RequiresAugmentedGraph) {
  SyntheticSpec spec;
  spec.num_entities = 8;
  spec.cluster_size = 2;
  const KnowledgeGraph raw = make_synthetic_kg(spec);
  ModelConfig c;
  c.num_entities = 8;
  c.num_relations = static_cast<std::int64_t>(raw.num_relations());
  c.entity_dim = c.relation_dim = 4;
  auto model = Model<float>::zeros(c);
  EXPECT_THROW(fit(model, raw, TrainConfig{}), StateError);
}

}  // namespace
}  // namespace tgcn
