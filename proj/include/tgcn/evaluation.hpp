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

// Filtered link-prediction ranking under the random tie-breaking protocol.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tgcn/kgdata.hpp"
#include "tgcn/model.hpp"

namespace tgcn {

enum class QueryDirection { kTargetSide, kSourceSideViaInverse };

struct RankedQuery {
  Triple triple;  // the raw test triple
  QueryDirection direction = QueryDirection::kTargetSide;
  std::int64_t rank = 0;
};

struct RankingReport {
  std::vector<RankedQuery> per_query;
  double mrr = 0.0;
  std::map<int, double> hits;  // k -> fraction with rank <= k, k in {1, 3, 10}
  std::string protocol = "random";
  std::uint64_t seed = 0;
  bool valid = false;  // false when there were no queries

  std::size_t n_queries() const { return per_query.size(); }
};

/// 1-based filtered rank of `true_target`. Candidates are all entities except
/// the known-true ones in `filter` (the true target itself always stays). Ties
/// are broken as if candidates were shuffled uniformly before a stable sort.
template <typename Real>
std::int64_t filtered_rank(std::span<const Real> scores, EntityId true_target,
                           std::span<const EntityId> filter, Rng& rng);

/// MRR and Hits@{1,3,10} from per-query ranks.
RankingReport summarize(std::vector<RankedQuery> per_query, std::uint64_t seed);

struct EvalOptions {
  std::size_t query_chunk = 1024;  // queries scored per matrix product
  unsigned threads = 1;            // ranking threads; results do not depend on it
};

/// Ranks (s, r, ?) and (t, r^-1, ?) for every raw triple of `split`, with
/// messages passed over the full training graph. `kg` must be augmented.
template <typename Real>
RankingReport evaluate(const Model<Real>& model, const KnowledgeGraph& kg, Split split, std::uint64_t seed,
                       const EvalOptions& options = {});

struct ReportContext {
  std::string dataset;
  std::string split;
  ParameterCount params;
};

/// Writes exactly the fields dataset, split, seed, n_queries, mrr, hits1,
/// hits3, hits10, nfp, efp as "key: value" lines.
void write_report(std::ostream& out, const RankingReport& report, const ReportContext& context);

}  // namespace tgcn
