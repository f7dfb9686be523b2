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

#ifndef MMRSEL_SELECTION_HPP_
#define MMRSEL_SELECTION_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mmrsel/corpus_store.hpp"
#include "mmrsel/relevance.hpp"

namespace mmrsel {

struct SelectionConfig {
  double lambda = 0.7;
  double subset_fraction = 0.05;      // alpha
  double prefilter_fraction = 0.15;   // rho
  std::size_t batch_size = 1024;      // B
  FusionWeights weights;
  AggregationMode aggregation = AggregationMode::kMax;
  std::uint64_t seed = 0;             // baselines only

  // Throws ConfigError naming the offending field.
  void validate() const;
};

struct Pick {
  std::size_t rank = 0;
  std::size_t index = 0;
  double relevance = 0.0;
  double diversity = 0.0;
  double mmr = 0.0;
  double cumulative_duration_s = 0.0;

  friend bool operator==(const Pick&, const Pick&) = default;
};

struct SelectionResult {
  std::vector<Pick> picks;
  double budget_s = 0.0;            // T
  double total_selected_s = 0.0;
  std::size_t pool_size = 0;
  std::size_t rounds = 0;
  // The candidate pool ran out before the budget was reached.
  bool pool_exhausted = false;
  std::vector<std::string> warnings;

  std::vector<std::size_t> indices() const;
};

// T = alpha * sum(durations).
double duration_budget(std::span<const double> durations, double alpha);

// ceil(rho * n), clamped to [1, n].
std::size_t prefilter_size(std::size_t n, double rho);

// Indices of the `count` highest-relevance candidates, highest first, ties
// broken by lower index.
std::vector<std::size_t> relevance_prefilter(std::span<const double> relevance,
                                             std::size_t count);

// Reference greedy MMR: one pick per step over all unselected candidates, no
// prefilter, no batching. The first pick is the relevance argmax; every later
// pick maximizes lambda * r - (1 - lambda) * v. Stops once the cumulative
// duration reaches T. Ties go to the lowest index.
SelectionResult greedy_mmr_exact(const RelevanceVector& relevance, const ViewMap& views,
                                 std::span<const double> durations,
                                 const SelectionConfig& cfg);

// Batched greedy MMR over a relevance prefilter. Each round scores the
// remaining pool against the selected set as of the previous round and
// commits the best B at once; picks within a batch are not compared with each
// other. The seed pick (relevance argmax) counts toward the budget before the
// first budget test, and a round's whole batch is committed even if the
// budget is crossed part way through it.
SelectionResult batched_mmr(const RelevanceVector& relevance, const ViewMap& views,
                            std::span<const double> durations, const SelectionConfig& cfg);

// Computes relevance from the targets (multi-dataset aggregation per
// cfg.aggregation) and runs the batched selector.
SelectionResult batched_mmr(const CorpusManifest& corpus, const TargetSet& targets,
                            const SelectionConfig& cfg);

// Seeded uniform shuffle, prefix taken until the budget is reached.
SelectionResult random_baseline(std::span<const double> durations, double alpha,
                                std::uint64_t seed);

// Matches the target duration distribution: quantile bins of the target
// durations, budget split across bins by target duration mass, uniform
// sampling inside a bin, shortfalls moved to the nearest bin that still has
// candidates. With one bin this is random_baseline under the same seed.
SelectionResult duration_baseline(std::span<const double> durations,
                                  std::span<const double> target_durations, double alpha,
                                  std::uint64_t seed, std::size_t bins = 20);

// Selection file: one JSON object per pick (rank, id, relevance, diversity,
// mmr, cumulative_duration_s) in pick order, then a footer object with T,
// total_selected_s, pool_size, rounds and pool_exhausted.
std::string encode_selection(const SelectionResult& result,
                             const std::vector<UtteranceRecord>& records);

// Interior quantile edges (bins - 1 of them) of `values`, linear interpolation.
std::vector<double> quantile_edges(std::vector<double> values, std::size_t bins);
std::size_t bin_of(const std::vector<double>& edges, double value);

}  // namespace mmrsel

#endif  // MMRSEL_SELECTION_HPP_
