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

#include "tgcn/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "tgcn/message_graph.hpp"

namespace tgcn {

using Eigen::Index;

template <typename Real>
std::int64_t filtered_rank(std::span<const Real> scores, EntityId true_target,
                           std::span<const EntityId> filter, Rng& rng) {
  if (true_target < 0 || static_cast<std::size_t>(true_target) >= scores.size()) {
    throw ArgumentError("true target id out of range");
  }
  const Real target_score = scores[static_cast<std::size_t>(true_target)];
  std::int64_t higher = 0;
  std::int64_t tied = 0;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    if (static_cast<EntityId>(c) == true_target) continue;
    if (scores[c] > target_score) {
      ++higher;
    } else if (scores[c] == target_score) {
      ++tied;
    }
  }
  for (EntityId f : filter) {
    if (f == true_target || f < 0 || static_cast<std::size_t>(f) >= scores.size()) continue;
    const Real s = scores[static_cast<std::size_t>(f)];
    if (s > target_score) {
      --higher;
    } else if (s == target_score) {
      --tied;
    }
  }
  // Under a uniform shuffle followed by a stable sort the target lands
  // uniformly among its tied group.
  std::int64_t ahead = 0;
  if (tied > 0) ahead = std::uniform_int_distribution<std::int64_t>(0, tied)(rng);
  return 1 + higher + ahead;
}

RankingReport summarize(std::vector<RankedQuery> per_query, std::uint64_t seed) {
  RankingReport report;
  report.seed = seed;
  report.per_query = std::move(per_query);
  report.hits = {{1, 0.0}, {3, 0.0}, {10, 0.0}};
  if (report.per_query.empty()) return report;
  report.valid = true;
  double rr = 0.0;
  for (const auto& q : report.per_query) {
    rr += 1.0 / static_cast<double>(q.rank);
    for (auto& [k, v] : report.hits) {
      if (q.rank <= k) v += 1.0;
    }
  }
  const auto n = static_cast<double>(report.per_query.size());
  report.mrr = rr / n;
  for (auto& [k, v] : report.hits) v /= n;
  return report;
}

namespace {

Rng query_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

}  // namespace

template <typename Real>
RankingReport evaluate(const Model<Real>& model, const KnowledgeGraph& kg, Split split, std::uint64_t seed,
                       const EvalOptions& options) {
  if (!kg.augmented()) throw StateError("evaluation expects a graph augmented with reciprocal relations");
  const auto raw = kg.raw_triples(split);
  std::vector<RankedQuery> queries;
  std::vector<DecoderQuery> decoder_queries;
  std::vector<EntityId> answers;
  queries.reserve(raw.size() * 2);
  for (const Triple& t : raw) {
    queries.push_back({t, QueryDirection::kTargetSide, 0});
    queries.push_back({t, QueryDirection::kSourceSideViaInverse, 0});
  }
  if (queries.empty()) return summarize({}, seed);

  const auto graph = MessageGraph::over_all_entities(kg.train(), kg.num_entities());
  const Matrix<Real> reps = encode(model, graph, DropoutRates{}, false, nullptr, static_cast<EncoderTape<Real>*>(nullptr));

  for (const auto& q : queries) {
    if (q.direction == QueryDirection::kTargetSide) {
      decoder_queries.push_back({q.triple.source, q.triple.relation});
      answers.push_back(q.triple.target);
    } else {
      decoder_queries.push_back({q.triple.target, kg.inverse(q.triple.relation)});
      answers.push_back(q.triple.source);
    }
  }

  const std::size_t chunk = std::max<std::size_t>(1, options.query_chunk);
  const unsigned threads = std::max(1u, options.threads);
  for (std::size_t begin = 0; begin < queries.size(); begin += chunk) {
    const std::size_t end = std::min(queries.size(), begin + chunk);
    const std::span<const DecoderQuery> part(decoder_queries.data() + begin, end - begin);
    const Matrix<Real> q = query_vectors(model.decoder, reps, part, model.tables.relation, 0.0, false,
                                         nullptr, static_cast<DecoderTape<Real>*>(nullptr));
    const Matrix<Real> scores = q * reps.transpose();
    auto rank_range = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const std::size_t qi = begin + i;
        const auto& dq = decoder_queries[qi];
        Rng rng = query_rng(seed, qi);
        const std::span<const Real> row(scores.data() + static_cast<Index>(i) * scores.cols(),
                                        static_cast<std::size_t>(scores.cols()));
        queries[qi].rank = filtered_rank(row, answers[qi],
                                         kg.filter_index().targets(static_cast<EntityId>(dq.source), dq.relation), rng);
      }
    };
    const std::size_t n = end - begin;
    if (threads == 1 || n < 2 * threads) {
      rank_range(0, n);
    } else {
      std::vector<std::jthread> pool;
      const std::size_t per = (n + threads - 1) / threads;
      for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * per, hi = std::min(n, lo + per);
        if (lo < hi) pool.emplace_back(rank_range, lo, hi);
      }
    }
  }
  return summarize(std::move(queries), seed);
}

void write_report(std::ostream& out, const RankingReport& report, const ReportContext& context) {
  std::ostringstream s;
  s << std::setprecision(6) << std::fixed;
  s << "dataset: " << context.dataset << "\n";
  s << "split: " << context.split << "\n";
  s << "seed: " << report.seed << "\n";
  s << "n_queries: " << report.n_queries() << "\n";
  s << "mrr: " << report.mrr << "\n";
  s << "hits1: " << report.hits.at(1) << "\n";
  s << "hits3: " << report.hits.at(3) << "\n";
  s << "hits10: " << report.hits.at(10) << "\n";
  s << "nfp: " << context.params.nfp << "\n";
  s << "efp: " << context.params.efp << "\n";
  out << s.str();
}

template std::int64_t filtered_rank(std::span<const float>, EntityId, std::span<const EntityId>, Rng&);
template std::int64_t filtered_rank(std::span<const double>, EntityId, std::span<const EntityId>, Rng&);
template RankingReport evaluate(const Model<float>&, const KnowledgeGraph&, Split, std::uint64_t,
                                const EvalOptions&);
template RankingReport evaluate(const Model<double>&, const KnowledgeGraph&, Split, std::uint64_t,
                                const EvalOptions&);

}  // namespace tgcn
