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
#include "tgcn/decoder.hpp"

namespace tgcn {
namespace {

Vector<double> vec(std::initializer_list<double> xs) {
  Vector<double> v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

DecoderParams<double> random_tucker(Index d, Index dr, Rng& rng) {
  auto p = DecoderParams<double>::tucker(d, dr);
  testing::fill_uniform(p.core.unfolded(), rng);
  return p;
}

TEST(Decoder, NamesRoundTrip) {
  for (auto k : {DecoderKind::kDistMult, DecoderKind::kTucker}) EXPECT_EQ(parse_decoder_kind(decoder_kind_name(k)), k);
  EXPECT_THROW(parse_decoder_kind("conve"), ArgumentError);
}

TEST(Decoder, DistMultExample) {
  const auto p = DecoderParams<double>::distmult();
  EXPECT_DOUBLE_EQ(score(p, vec({1, 2}), vec({1, 0}), vec({3, 4})), 3.0);
  EXPECT_EQ(p.parameter_count(), 0);
}

TEST(Decoder, TuckerZeroCoreScoresZero) {
  const auto p = DecoderParams<double>::tucker(3, 2);
  Rng rng(1);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(score(p, testing::random_vector<double>(3, rng), testing::random_vector<double>(2, rng),
                    testing::random_vector<double>(3, rng)),
              0.0);
  }
}

TEST(Decoder, TuckerScalarCase) {
  auto p = DecoderParams<double>::tucker(1, 1);
  p.core(0, 0, 0) = 2.0;
  EXPECT_DOUBLE_EQ(score(p, vec({3}), vec({5}), vec({7})), 210.0);
  EXPECT_EQ(p.parameter_count(), 1);
}

TEST(Decoder, TuckerMatchesTrilinearOracle) {
  Rng rng(2);
  const auto p = random_tucker(4, 3, rng);
  for (int i = 0; i < 10; ++i) {
    const auto hs = testing::random_vector<double>(4, rng), er = testing::random_vector<double>(3, rng),
               ht = testing::random_vector<double>(4, rng);
    EXPECT_NEAR(score(p, hs, er, ht),
                testing::tucker(testing::to_cube(p.core), testing::to_vec(hs), testing::to_vec(er), testing::to_vec(ht)),
                1e-12);
  }
}

TEST(Decoder, SuperdiagonalTuckerIsDistMult) {
  Rng rng(3);
  const Index d = 5;
  auto tucker64 = DecoderParams<double>::tucker(d, d);
  auto tucker32 = DecoderParams<float>::tucker(d, d);
  for (Index i = 0; i < d; ++i) {
    tucker64.core(i, i, i) = 1.0;
    tucker32.core(i, i, i) = 1.0f;
  }
  const auto dm64 = DecoderParams<double>::distmult();
  const auto dm32 = DecoderParams<float>::distmult();
  for (int t = 0; t < 20; ++t) {
    const auto hs = testing::random_vector<double>(d, rng), er = testing::random_vector<double>(d, rng),
               ht = testing::random_vector<double>(d, rng);
    EXPECT_EQ(score(tucker64, hs, er, ht), score(dm64, hs, er, ht));
    const Vector<float> a = hs.cast<float>(), b = er.cast<float>(), c = ht.cast<float>();
    EXPECT_NEAR(score(tucker32, a, b, c), score(dm32, a, b, c), 1e-6);
  }
}

TEST(Decoder, DistMultSymmetric) {
  Rng rng(4);
  const auto p = DecoderParams<double>::distmult();
  const auto a = testing::random_vector<double>(6, rng), r = testing::random_vector<double>(6, rng),
             b = testing::random_vector<double>(6, rng);
  EXPECT_DOUBLE_EQ(score(p, a, r, b), score(p, b, r, a));
}

TEST(Decoder, TrilinearInEachArgument) {
  Rng rng(5);
  const auto tucker = random_tucker(3, 3, rng);
  const auto dm = DecoderParams<double>::distmult();
  const double alpha = 1.75;
  for (const auto* p : {&tucker, &dm}) {
    const auto a = testing::random_vector<double>(3, rng), r = testing::random_vector<double>(3, rng),
               b = testing::random_vector<double>(3, rng), a2 = testing::random_vector<double>(3, rng);
    const double base = score(*p, a, r, b);
    EXPECT_NEAR(score(*p, Vector<double>(alpha * a), r, b), alpha * base, 1e-12);
    EXPECT_NEAR(score(*p, a, Vector<double>(alpha * r), b), alpha * base, 1e-12);
    EXPECT_NEAR(score(*p, a, r, Vector<double>(alpha * b)), alpha * base, 1e-12);
    EXPECT_NEAR(score(*p, Vector<double>(a + a2), r, b), base + score(*p, a2, r, b), 1e-12);
  }
}

TEST(Decoder, BatchedScoresMatchLoop) {
  Rng rng(6);
  const auto tucker = random_tucker(4, 4, rng);
  const auto dm = DecoderParams<double>::distmult();
  Matrix<double> candidates(7, 4);
  testing::fill_uniform(candidates, rng);
  for (const auto* p : {&tucker, &dm}) {
    const auto hs = testing::random_vector<double>(4, rng), er = testing::random_vector<double>(4, rng);
    const Vector<double> all = score_all_targets(*p, hs, er, candidates);
    ASSERT_EQ(all.size(), 7);
    for (Index c = 0; c < 7; ++c) {
      EXPECT_NEAR(all[c], score(*p, hs, er, Vector<double>(candidates.row(c).transpose())), 1e-12);
    }
    const Matrix<double> one = candidates.topRows(1);
    EXPECT_NEAR(score_all_targets(*p, hs, er, one)[0], all[0], 1e-15);
  }
}

TEST(Decoder, DistMultOverIdentityCandidates) {
  const auto p = DecoderParams<double>::distmult();
  const auto hs = vec({1, -2, 3}), er = vec({0.5, 2, -1});
  const Vector<double> got = score_all_targets(p, hs, er, Matrix<double>(Matrix<double>::Identity(3, 3)));
  EXPECT_EQ(got, Vector<double>(hs.cwiseProduct(er)));
}

TEST(Decoder, ShapeErrors) {
  const auto dm = DecoderParams<double>::distmult();
  EXPECT_THROW(score(dm, vec({1, 2}), vec({1}), vec({1, 2})), ShapeError);
  const auto tk = DecoderParams<double>::tucker(2, 3);
  EXPECT_THROW(score(tk, vec({1, 2}), vec({1, 2}), vec({1, 2})), ShapeError);
  EXPECT_THROW(score_all_targets(tk, vec({1, 2}), vec({1, 2, 3}), Matrix<double>(Matrix<double>::Zero(2, 3))),
               ShapeError);
}

TEST(Decoder, QueryVectorsMatchScores) {
  Rng rng(7);
  const auto tucker = random_tucker(3, 2, rng);
  Matrix<double> reps(4, 3), rel(3, 2);
  testing::fill_uniform(reps, rng);
  testing::fill_uniform(rel, rng);
  const std::vector<DecoderQuery> queries{{0, 1}, {2, 0}, {3, 1}, {1, 2}};
  const Matrix<double> q = query_vectors(tucker, reps, std::span<const DecoderQuery>(queries), rel, 0.0, false, nullptr,
                                         static_cast<DecoderTape<double>*>(nullptr));
  const Matrix<double> scores = q * reps.transpose();
  for (std::size_t i = 0; i < queries.size(); ++i) {
    for (Index t = 0; t < 4; ++t) {
      EXPECT_NEAR(scores(static_cast<Index>(i), t),
                  score(tucker, Vector<double>(reps.row(queries[i].source).transpose()),
                        Vector<double>(rel.row(queries[i].relation).transpose()), Vector<double>(reps.row(t).transpose())),
                  1e-12);
    }
  }
}

TEST(Decoder, LogisticView) {
  EXPECT_DOUBLE_EQ(logistic(0.0), 0.5);
  EXPECT_GT(logistic(3.0), logistic(2.0));
}

}  // namespace
}  // namespace tgcn
