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

#include "oracles.hpp"
#include "tgcn/encoder.hpp"
#include "tgcn/model.hpp"

namespace tgcn {
namespace {

using testing::Mat;

EncoderLayer<double> dense_layer(Index d, Index dr, Activation act) {
  return {CoreTensor<double>::make_dense({d, dr, d}), Matrix<double>::Zero(d, d), act};
}

Matrix<double> run_layer(const EncoderLayer<double>& layer, const std::vector<Triple>& triples, std::size_t n,
                         const Matrix<double>& h, const Matrix<double>& rel) {
  const auto g = MessageGraph::over_all_entities(triples, n);
  return layer_forward(layer, g, h, rel, 0.0, false, nullptr, static_cast<LayerTape<double>*>(nullptr));
}

ModelConfig tiny_config(CoreLayout layout, DecoderKind decoder = DecoderKind::kDistMult) {
  ModelConfig c;
  c.layout = layout;
  c.decoder = decoder;
  c.num_entities = 6;
  c.num_relations = 4;
  c.entity_dim = 3;
  c.relation_dim = 3;
  c.num_bases = 2;
  return c;
}

TEST(Activation, NamesRoundTrip) {
  for (Activation a : {Activation::kIdentity, Activation::kRelu}) EXPECT_EQ(parse_activation(activation_name(a)), a);
  EXPECT_THROW(parse_activation("tanh"), ArgumentError);
}

TEST(Activation, ReluAndBackward) {
  Matrix<double> x(1, 3);
  x << -1, 0.5, 2;
  const Matrix<double> pre = x;
  apply_activation(Activation::kRelu, x);
  EXPECT_EQ(x(0, 0), 0.0);
  EXPECT_EQ(x(0, 2), 2.0);
  Matrix<double> g = Matrix<double>::Ones(1, 3);
  activation_backward(Activation::kRelu, pre, g);
  EXPECT_EQ(g(0, 0), 0.0);
  EXPECT_EQ(g(0, 1), 1.0);
}

TEST(Dropout, InactiveOutsideTraining) {
  Matrix<double> x = Matrix<double>::Ones(4, 4), mask;
  dropout_forward(x, 0.5, false, nullptr, &mask);
  EXPECT_EQ(x.sum(), 16.0);
  EXPECT_EQ(mask.size(), 0);
}

TEST(Dropout, InvertedScalingAndMask) {
  Rng rng(1);
  Matrix<double> x = Matrix<double>::Ones(200, 50), mask;
  dropout_forward(x, 0.2, true, &rng, &mask);
  ASSERT_EQ(mask.rows(), 200);
  for (Index i = 0; i < x.size(); ++i) {
    EXPECT_TRUE(x.data()[i] == 0.0 || std::abs(x.data()[i] - 1.25) < 1e-12);
  }
  EXPECT_NEAR(x.mean(), 1.0, 0.05);
  Matrix<double> g = Matrix<double>::Ones(200, 50);
  dropout_backward(mask, g);
  EXPECT_EQ(g, mask);
}

TEST(Dropout, RateOfOneRejected) {
  Rng rng(1);
  Matrix<double> x = Matrix<double>::Ones(2, 2);
  EXPECT_THROW(dropout_forward(x, 1.0, true, &rng, static_cast<Matrix<double>*>(nullptr)), ArgumentError);
}

TEST(EncoderLayer, IsolatedEntityGetsLoopTermOnly) {
  auto layer = dense_layer(2, 2, Activation::kRelu);
  layer.loop_weight << 1, -2, 0.5, 1;
  Rng rng(2);
  testing::fill_uniform(layer.core.dense.unfolded(), rng);
  Matrix<double> h(3, 2), rel = Matrix<double>::Ones(1, 2);
  h << 1, 1, 2, 3, -1, 4;
  // Entity 2 has no in-edges.
  const Matrix<double> out = run_layer(layer, {{0, 0, 1}}, 3, h, rel);
  const Vector<double> want = (layer.loop_weight * h.row(2).transpose()).cwiseMax(0.0);
  EXPECT_LT((out.row(2).transpose() - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EncoderLayer, SingleNeighbourHandExpanded) {
  auto layer = dense_layer(2, 2, Activation::kIdentity);
  // W[i,j,k] = 1 + i + 2j + 4k
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j)
      for (Index k = 0; k < 2; ++k) layer.core.dense(i, j, k) = 1.0 + i + 2.0 * j + 4.0 * k;
  layer.loop_weight << 1, 2, 3, 4;
  Matrix<double> h(2, 2), rel(1, 2);
  h << 1, 2,   // u
      3, -1;   // v
  rel << 0.5, -1;
  const Matrix<double> out = run_layer(layer, {{0, 0, 1}}, 2, h, rel);
  // f_k = sum_ij W[i,j,k] h_u[i] e[j]
  //   k=0: W000*1*.5 + W010*1*-1 + W100*2*.5 + W110*2*-1 = .5 - 3 + 2 - 8 = -8.5
  //   k=1: 5*.5 - 7 + 6*2*.5 - 8*2 = 2.5 - 7 + 6 - 16 = -14.5
  // W0 h_v = [1*3 + 2*-1, 3*3 + 4*-1] = [1, 5]
  EXPECT_NEAR(out(1, 0), -7.5, 1e-12);
  EXPECT_NEAR(out(1, 1), -9.5, 1e-12);
}

TEST(EncoderLayer, TwoNeighboursAreAveraged) {
  Rng rng(3);
  auto layer = dense_layer(3, 2, Activation::kIdentity);
  testing::fill_uniform(layer.core.dense.unfolded(), rng);
  Matrix<double> h(3, 3), rel(1, 2);
  testing::fill_uniform(h, rng);
  testing::fill_uniform(rel, rng);
  const Matrix<double> out = run_layer(layer, {{0, 0, 2}, {1, 0, 2}}, 3, h, rel);
  const Vector<double> e = rel.row(0).transpose();
  const Vector<double> m0 = relation_transform(layer.core, Vector<double>(h.row(0).transpose()), e);
  const Vector<double> m1 = relation_transform(layer.core, Vector<double>(h.row(1).transpose()), e);
  EXPECT_LT((out.row(2).transpose() - 0.5 * (m0 + m1)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EncoderLayer, DuplicatedEdgesLeaveAggregateUnchanged) {
  Rng rng(4);
  auto layer = dense_layer(3, 3, Activation::kRelu);
  testing::fill_uniform(layer.core.dense.unfolded(), rng);
  testing::fill_uniform(layer.loop_weight, rng);
  Matrix<double> h(4, 3), rel(2, 3);
  testing::fill_uniform(h, rng);
  testing::fill_uniform(rel, rng);
  const std::vector<Triple> base{{0, 0, 3}, {1, 0, 3}, {2, 1, 3}, {3, 1, 0}};
  const Matrix<double> once = run_layer(layer, base, 4, h, rel);
  for (int k = 2; k <= 4; ++k) {
    std::vector<Triple> repeated;
    for (int c = 0; c < k; ++c) repeated.insert(repeated.end(), base.begin(), base.end());
    EXPECT_LT((run_layer(layer, repeated, 4, h, rel) - once).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(EncoderLayer, ShapeErrors) {
  const auto layer = dense_layer(2, 2, Activation::kRelu);
  const Matrix<double> rel = Matrix<double>::Zero(1, 2);
  EXPECT_THROW(run_layer(layer, {{0, 0, 1}}, 2, Matrix<double>::Zero(2, 3), rel), ShapeError);
  EXPECT_THROW(run_layer(layer, {{0, 0, 1}}, 2, Matrix<double>::Zero(2, 2), Matrix<double>::Zero(1, 3)), ShapeError);
  EXPECT_THROW(run_layer(layer, {{0, 1, 1}}, 2, Matrix<double>::Zero(2, 2), rel), ShapeError);
}

TEST(Encode, MatchesReferenceForBothLayouts) {
  for (CoreLayout layout : {CoreLayout::kDense, CoreLayout::kCp}) {
    Rng rng(5);
    const auto model = Model<double>::initialized(tiny_config(layout), rng);
    const std::vector<Triple> triples{{0, 0, 1}, {1, 2, 0}, {2, 1, 1}, {1, 3, 2}, {3, 0, 4}, {4, 2, 3}, {0, 1, 4}};
    const auto graph = MessageGraph::over_all_entities(triples, 6);
    const Matrix<double> got =
        encode(model, graph, DropoutRates{}, false, nullptr, static_cast<EncoderTape<double>*>(nullptr));
    const Mat want = testing::reference_encode(model, triples, graph.nodes());
    for (Index v = 0; v < got.rows(); ++v)
      for (Index k = 0; k < got.cols(); ++k) EXPECT_NEAR(got(v, k), want[v][k], 1e-12) << v << "," << k;
  }
}

TEST(Encode, ActiveNodeGraphMatchesReference) {
  Rng rng(6);
  const auto model = Model<double>::initialized(tiny_config(CoreLayout::kCp), rng);
  const Subgraph sub = Subgraph::from_triples({{5, 0, 2}, {2, 1, 5}, {3, 3, 2}});
  const auto graph = MessageGraph::over_active_entities(sub, 6);
  const Matrix<double> got =
      encode(model, graph, DropoutRates{}, false, nullptr, static_cast<EncoderTape<double>*>(nullptr));
  ASSERT_EQ(got.rows(), 3);
  const Mat want = testing::reference_encode(model, sub.triples, graph.nodes());
  for (Index v = 0; v < 3; ++v)
    for (Index k = 0; k < 3; ++k) EXPECT_NEAR(got(v, k), want[v][k], 1e-12);
}

TEST(Encode, ZeroWeightsGiveZeroOutput) {
  auto cfg = tiny_config(CoreLayout::kDense);
  cfg.hidden_activation = Activation::kIdentity;
  Rng rng(7);
  auto model = Model<double>::initialized(cfg, rng);
  for (auto& l : model.layers) {
    l.core.set_zero();
    l.loop_weight.setZero();
  }
  const auto graph = MessageGraph::over_all_entities(std::vector<Triple>{{0, 0, 1}, {1, 1, 2}}, 6);
  const Matrix<double> out =
      encode(model, graph, DropoutRates{}, false, nullptr, static_cast<EncoderTape<double>*>(nullptr));
  EXPECT_EQ(out.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Encode, DeterministicWithoutDropout) {
  Rng rng(8);
  const auto model = Model<float>::initialized(tiny_config(CoreLayout::kCp), rng);
  const auto graph = MessageGraph::over_all_entities(std::vector<Triple>{{0, 0, 1}, {1, 1, 2}, {2, 2, 0}}, 6);
  Rng a(1), b(99);
  const auto x = encode(model, graph, DropoutRates{}, true, &a, static_cast<EncoderTape<float>*>(nullptr));
  const auto y = encode(model, graph, DropoutRates{}, true, &b, static_cast<EncoderTape<float>*>(nullptr));
  EXPECT_EQ(x, y);
}

TEST(Encode, TwoLayerLocality) {
  // Chain 0 - 1 - 2 - 3 with both directions present.
  std::vector<Triple> triples;
  for (EntityId i = 0; i < 3; ++i) {
    triples.push_back({i, 0, i + 1});
    triples.push_back({i + 1, 2, i});
  }
  Rng rng(9);
  auto model = Model<double>::initialized(tiny_config(CoreLayout::kDense), rng);
  const auto graph = MessageGraph::over_all_entities(triples, 6);
  auto run = [&](const Model<double>& m) {
    return encode(m, graph, DropoutRates{}, false, nullptr, static_cast<EncoderTape<double>*>(nullptr));
  };
  const Matrix<double> base = run(model);
  auto far = model;
  far.tables.entity.row(3) *= -3.0;  // three hops from entity 0
  EXPECT_EQ(run(far).row(0), base.row(0));
  auto near = model;
  near.tables.entity.row(2) *= -3.0;  // two hops
  EXPECT_GT((run(near).row(0) - base.row(0)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ModelCounts, ClosedFormsForReferenceDatasets) {
  ModelConfig c;
  c.num_entities = 14541;
  c.num_relations = 474;
  c.decoder = DecoderKind::kDistMult;
  EXPECT_EQ(count_parameters(c).nfp, 2 * (100 * 100 * 100 + 100 * 100));
  EXPECT_EQ(count_parameters(c).efp, (14541 + 474) * 100);
  c.decoder = DecoderKind::kTucker;
  EXPECT_EQ(count_parameters(c).nfp, 3020000);
  EXPECT_EQ(count_parameters(c).enfp, 2020000);
  c.layout = CoreLayout::kCp;
  EXPECT_EQ(count_parameters(c).nfp, 1080000);
  c.decoder = DecoderKind::kDistMult;
  EXPECT_EQ(count_parameters(c).nfp, 80000);
  c.num_entities = 40943;
  c.num_relations = 22;
  EXPECT_EQ(count_parameters(c).efp, 4096500);
}

TEST(ModelCounts, AllocatedArraysAgreeWithClosedForm) {
  for (EncoderKind enc : {EncoderKind::kTgcn, EncoderKind::kRgcn}) {
    for (DecoderKind dec : {DecoderKind::kDistMult, DecoderKind::kTucker}) {
      for (int variant = 0; variant < 4; ++variant) {
        ModelConfig c;
        c.encoder = enc;
        c.decoder = dec;
        c.layout = variant % 2 ? CoreLayout::kCp : CoreLayout::kDense;
        c.rgcn_scheme = static_cast<WeightScheme>(variant);
        c.num_entities = 7;
        c.num_relations = 4;
        c.entity_dim = c.relation_dim = 6;
        c.num_bases = 3;
        c.num_blocks = 2;
        const auto model = Model<float>::zeros(c);
        const auto a = count_parameters(c), b = count_parameters(model);
        EXPECT_EQ(a.nfp, b.nfp);
        EXPECT_EQ(a.efp, b.efp);
        EXPECT_EQ(a.enfp, b.enfp);
        EXPECT_EQ(a.rgcn_loop, b.rgcn_loop);
        std::int64_t total = 0;
        model.visit([&](const std::string&, const Matrix<float>& m) { total += m.size(); });
        EXPECT_EQ(total, a.nfp + a.efp + a.rgcn_loop);
      }
    }
  }
}

TEST(ModelConfig, ValidationErrors) {
  ModelConfig c = tiny_config(CoreLayout::kCp);
  c.relation_dim = 4;
  EXPECT_THROW(c.validate(), ConfigError);
  c = tiny_config(CoreLayout::kCp);
  c.num_bases = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = tiny_config(CoreLayout::kDense);
  c.num_entities = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(parse_encoder_kind("gat"), ArgumentError);
  EXPECT_THROW(parse_core_layout("tt"), ArgumentError);
}

TEST(Model, ParameterNamesAreStableAndUnique) {
  const auto model = Model<float>::zeros(tiny_config(CoreLayout::kCp, DecoderKind::kTucker));
  const auto names = model.parameter_names();
  EXPECT_EQ(names, (std::vector<std::string>{"entity", "relation", "layer0.core.w1", "layer0.core.w2",
                                             "layer0.core.w3", "layer0.loop", "layer1.core.w1", "layer1.core.w2",
                                             "layer1.core.w3", "layer1.loop", "decoder.core"}));
}

TEST(Model, CastRoundTripPreservesFloatValues) {
  Rng rng(10);
  const auto model = Model<float>::initialized(tiny_config(CoreLayout::kDense, DecoderKind::kTucker), rng);
  const auto back = cast_model<float>(cast_model<double>(model));
  std::vector<Matrix<float>> a, b;
  model.visit([&](const std::string&, const Matrix<float>& m) { a.push_back(m); });
  back.visit([&](const std::string&, const Matrix<float>& m) { b.push_back(m); });
  EXPECT_EQ(a, b);
  EXPECT_TRUE(model.all_finite());
}

}  // namespace
}  // namespace tgcn
