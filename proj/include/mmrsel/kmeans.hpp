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

#ifndef MMRSEL_KMEANS_HPP_
#define MMRSEL_KMEANS_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mmrsel/corpus_store.hpp"
#include "mmrsel/matrix.hpp"

namespace mmrsel {

struct KMeansConfig {
  std::size_t k = 200;
  std::size_t max_iters = 100;
  // Lloyd stops once the centroid shift, relative to the centroid norm, drops
  // below this.
  double tol = 1e-4;
  std::uint64_t seed = 0;
  // Initialization is always k-means++.

  void validate() const;
};

struct Clustering {
  Matrix centroids;
  std::vector<std::uint32_t> assignments;
  double inertia = 0.0;
  std::size_t iterations = 0;
  // Inertia after the initial assignment and after every Lloyd iteration.
  std::vector<double> inertia_history;
  // Fewer distinct rows than requested clusters: k was reduced to the number
  // of distinct rows (1 when every row is identical).
  bool degenerate = false;

  std::size_t k() const { return centroids.rows(); }
};

// Lloyd's algorithm from k-means++ seeds, deterministic in cfg.seed and
// independent of the worker count. Assignment ties go to the lowest centroid
// index. Empty clusters are repaired by moving the point farthest from its
// centroid into them, so every returned cluster is nonempty. When k exceeds
// the number of distinct rows, k is reduced and `degenerate` is set.
Clustering kmeans(const Matrix& rows, const KMeansConfig& cfg);

// Squared Euclidean distance accumulated in double.
double squared_distance(const float* a, const float* b, std::size_t n);

struct CompactionReport {
  std::string dataset;
  std::string view;
  std::size_t rows_before = 0;
  std::size_t rows_after = 0;
  double inertia = 0.0;
  std::size_t iterations = 0;
  bool degenerate = false;
};

// Per dataset and per view independently: matrices with more than k rows are
// replaced by their k centroids, each L2-renormalized; smaller ones pass
// through untouched. Sets compacted = true.
TargetSet compact_targets(const TargetSet& targets, const KMeansConfig& cfg,
                          std::vector<CompactionReport>* report = nullptr);

std::string format_compaction_report(const std::vector<CompactionReport>& report);

}  // namespace mmrsel

#endif  // MMRSEL_KMEANS_HPP_
