// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MMRSEL_RELEVANCE_HPP_
#define MMRSEL_RELEVANCE_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mmrsel/corpus_store.hpp"
#include "mmrsel/matrix.hpp"

namespace mmrsel {

// Per-view weights for late fusion, normalized to sum to 1 at construction.
// Views with weight 0 are dropped.
class FusionWeights {
 public:
  FusionWeights() = default;
  // Throws ConfigError for negative/non-finite weights or when no weight is
  // positive.
  explicit FusionWeights(const std::map<std::string, double>& raw);

  static FusionWeights uniform(const std::vector<std::string>& names);
  static FusionWeights single(const std::string& name) { return uniform({name}); }
  // "speaker=0.33,wavlm=0.33,sbert=0.34"
  static FusionWeights parse(std::string_view text);

  // (name, weight) in name order; weights sum to 1.
  const std::vector<std::pair<std::string, double>>& entries() const { return entries_; }
  std::vector<std::string> names() const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  friend bool operator==(const FusionWeights&, const FusionWeights&) = default;

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

// Parses "name=value,name=value" into raw (unnormalized) weights.
std::map<std::string, double> parse_weight_spec(std::string_view text);

enum class AggregationMode { kMax, kMean };

std::string_view to_string(AggregationMode mode);
AggregationMode parse_aggregation(std::string_view text);

// One score per candidate, each within [-1, 1].
using RelevanceVector = std::vector<double>;

using ViewMap = std::map<std::string, EmbeddingView>;
using TargetViews = std::map<std::string, Matrix>;

// scores[i] = max over target rows y of cosine(candidates[i], y).
// Throws EmptyTargets, DimensionMismatch.
RelevanceVector relevance_single(const Matrix& candidates, const Matrix& targets);

// scores[i] = sum_k w_k * max_y cosine(x_i^(k), y^(k)). Throws MissingView.
RelevanceVector relevance_fused(const ViewMap& views, const TargetViews& targets,
                                const FusionWeights& weights);

// Fused relevance per target dataset, then max or mean over datasets.
// Throws EmptyTargetSet.
RelevanceVector relevance_multi_dataset(const ViewMap& views, const TargetSet& targets,
                                        const FusionWeights& weights,
                                        AggregationMode mode);

// v = sum_k w_k * max over s in selected of cosine(x_candidate^(k), x_s^(k)).
// Throws EmptySelection.
double diversity_penalty(std::size_t candidate, std::span<const std::size_t> selected,
                         const ViewMap& views, const FusionWeights& weights);

// For each p: running[p] = max(running[p], max over s in added of
// cosine(rows[candidates[p]], rows[s])). This is the incremental form of the
// inner max in diversity_penalty.
void update_running_max(const Matrix& rows, std::span<const std::size_t> candidates,
                        std::span<const std::size_t> added, std::span<double> running);

// sum_k w_k * per_view[k][p], accumulated in weight order; per_view is
// aligned with weights.entries().
double combine_weighted(const FusionWeights& weights,
                        const std::vector<std::vector<double>>& per_view, std::size_t p);

}  // namespace mmrsel

#endif  // MMRSEL_RELEVANCE_HPP_
