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

#include "mmrsel/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "mmrsel/errors.hpp"
#include "mmrsel/parallel.hpp"
#include "mmrsel/random.hpp"

namespace mmrsel {
namespace {

constexpr std::size_t kAssignGrain = 256;
constexpr std::size_t kSumGrain = 4096;
constexpr std::size_t kDoubleLanes = 8;

std::size_t count_distinct_rows(const Matrix& rows, std::size_t stop_at) {
  std::vector<std::size_t> order(rows.rows());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    auto ra = rows.row(a);
    auto rb = rows.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  };
  std::sort(order.begin(), order.end(), less);
  std::size_t distinct = order.empty() ? 0 : 1;
  for (std::size_t i = 1; i < order.size() && distinct < stop_at; ++i) {
    if (less(order[i - 1], order[i])) ++distinct;
  }
  return distinct;
}

struct State {
  const Matrix& rows;
  Matrix centroids;
  std::vector<std::uint32_t> assignments;
  std::vector<double> dist2;
};

void assign(State& s) {
  const std::size_t k = s.centroids.rows();
  const std::size_t d = s.rows.cols();
  parallel_for_chunks(s.rows.rows(), kAssignGrain, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const float* x = s.rows.row(i).data();
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t arg = 0;
      for (std::size_t c = 0; c < k; ++c) {
        double dd = squared_distance(x, s.centroids.row(c).data(), d);
        if (dd < best) {
          best = dd;
          arg = static_cast<std::uint32_t>(c);
        }
      }
      s.assignments[i] = arg;
      s.dist2[i] = best;
    }
  });
}

// Returns true if any cluster was empty.
bool repair_empty(State& s) {
  const std::size_t k = s.centroids.rows();
  std::vector<std::size_t> sizes(k, 0);
  for (auto a : s.assignments) ++sizes[a];
  bool repaired = false;
  for (std::size_t c = 0; c < k; ++c) {
    if (sizes[c] != 0) continue;
    std::size_t far = s.rows.rows();
    double far_d = -1.0;
    for (std::size_t i = 0; i < s.rows.rows(); ++i) {
      if (sizes[s.assignments[i]] > 1 && s.dist2[i] > far_d) {
        far_d = s.dist2[i];
        far = i;
      }
    }
    if (far == s.rows.rows()) break;
    --sizes[s.assignments[far]];
    ++sizes[c];
    s.assignments[far] = static_cast<std::uint32_t>(c);
    s.dist2[far] = 0.0;
    auto src = s.rows.row(far);
    std::copy(src.begin(), src.end(), s.centroids.row(c).begin());
    repaired = true;
  }
  return repaired;
}

void assign_and_repair(State& s) {
  assign(s);
  // A repaired centroid sits on a data point and may pull in neighbours, so
  // reassign until no cluster is empty. A handful of rounds always suffices
  // for distinct rows; the cap only matters for adversarial duplicates.
  for (int round = 0; round < 16 && repair_empty(s); ++round) assign(s);
}

double total_inertia(const State& s) {
  const std::size_t chunks = chunk_count(s.dist2.size(), kSumGrain);
  std::vector<double> partial(chunks, 0.0);
  parallel_for_chunks(s.dist2.size(), kSumGrain, [&](std::size_t c, std::size_t b, std::size_t e) {
    double sum = 0.0;
    for (std::size_t i = b; i < e; ++i) sum += s.dist2[i];
    partial[c] = sum;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

Matrix update_centroids(const State& s) {
  const std::size_t k = s.centroids.rows();
  const std::size_t d = s.rows.cols();
  const std::size_t n = s.rows.rows();
  const std::size_t chunks = chunk_count(n, kSumGrain);
  std::vector<std::vector<double>> sums(chunks);
  std::vector<std::vector<std::size_t>> counts(chunks);
  parallel_for_chunks(n, kSumGrain, [&](std::size_t c, std::size_t b, std::size_t e) {
    auto& sum = sums[c];
    auto& cnt = counts[c];
    sum.assign(k * d, 0.0);
    cnt.assign(k, 0);
    for (std::size_t i = b; i < e; ++i) {
      const std::size_t a = s.assignments[i];
      auto x = s.rows.row(i);
      double* dst = sum.data() + a * d;
      for (std::size_t j = 0; j < d; ++j) dst[j] += x[j];
      ++cnt[a];
    }
  });
  std::vector<double> total(k * d, 0.0);
  std::vector<std::size_t> count(k, 0);
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t j = 0; j < k * d; ++j) total[j] += sums[c][j];
    for (std::size_t j = 0; j < k; ++j) count[j] += counts[c][j];
  }
  Matrix out(k, d);
  for (std::size_t c = 0; c < k; ++c) {
    if (count[c] == 0) {
      auto old = s.centroids.row(c);
      std::copy(old.begin(), old.end(), out.row(c).begin());
      continue;
    }
    const double inv = 1.0 / static_cast<double>(count[c]);
    for (std::size_t j = 0; j < d; ++j) out(c, j) = static_cast<float>(total[c * d + j] * inv);
  }
  return out;
}

Matrix kmeans_plus_plus(const Matrix& rows, std::size_t k, std::uint64_t seed) {
  const std::size_t n = rows.rows();
  const std::size_t d = rows.cols();
  Rng rng(seed, streams::kKMeansInit);
  Matrix centroids(k, d);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());

  std::size_t pick = rng.below(n);
  for (std::size_t c = 0; c < k; ++c) {
    auto src = rows.row(pick);
    std::copy(src.begin(), src.end(), centroids.row(c).begin());
    if (c + 1 == k) break;
    const float* y = centroids.row(c).data();
    parallel_for_chunks(n, kAssignGrain, [&](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        best[i] = std::min(best[i], squared_distance(rows.row(i).data(), y, d));
      }
    });
    double total = 0.0;
    for (double v : best) total += v;
    if (total <= 0.0) {
      throw Error("k-means++: fewer distinct rows than clusters");
    }
    const double target = rng.uniform() * total;
    double cum = 0.0;
    pick = n;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (best[i] <= 0.0) continue;
      last_positive = i;
      cum += best[i];
      if (cum > target) {
        pick = i;
        break;
      }
    }
    if (pick == n) pick = last_positive;
  }
  return centroids;
}

}  // namespace

double squared_distance(const float* a, const float* b, std::size_t n) {
  double acc[kDoubleLanes] = {};
  const std::size_t full = n - n % kDoubleLanes;
  for (std::size_t j = 0; j < full; j += kDoubleLanes) {
    for (std::size_t l = 0; l < kDoubleLanes; ++l) {
      const double t = static_cast<double>(a[j + l]) - b[j + l];
      acc[l] += t * t;
    }
  }
  for (std::size_t j = full; j < n; ++j) {
    const double t = static_cast<double>(a[j]) - b[j];
    acc[j - full] += t * t;
  }
  return ((acc[0] + acc[4]) + (acc[2] + acc[6])) + ((acc[1] + acc[5]) + (acc[3] + acc[7]));
}

void KMeansConfig::validate() const {
  if (k == 0) throw ConfigError("k-means: k must be positive");
  if (max_iters == 0) throw ConfigError("k-means: max_iters must be positive");
  if (!(tol >= 0.0)) throw ConfigError("k-means: tol must be nonnegative");
}

Clustering kmeans(const Matrix& rows, const KMeansConfig& cfg) {
  cfg.validate();
  if (rows.rows() == 0 || rows.cols() == 0) throw TooFewRows("k-means on an empty matrix");
  for (float v : rows.values()) {
    if (!std::isfinite(v)) throw Error("k-means input contains non-finite values");
  }

  Clustering result;
  std::size_t k = std::min(cfg.k, rows.rows());
  const std::size_t distinct = count_distinct_rows(rows, k);
  if (distinct < k) {
    std::fprintf(stderr, "warning: k-means requested k=%zu but only %zu distinct rows; using k=%zu\n",
                 cfg.k, distinct, distinct);
    k = distinct;
    result.degenerate = true;
  }

  State s{rows, kmeans_plus_plus(rows, k, cfg.seed),
          std::vector<std::uint32_t>(rows.rows(), 0), std::vector<double>(rows.rows(), 0.0)};
  assign_and_repair(s);
  double inertia = total_inertia(s);
  result.inertia_history.push_back(inertia);

  std::size_t it = 0;
  while (it < cfg.max_iters) {
    ++it;
    Matrix next = update_centroids(s);
    double shift = 0.0, base = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      shift += squared_distance(next.row(c).data(), s.centroids.row(c).data(), rows.cols());
      for (float v : s.centroids.row(c)) base += static_cast<double>(v) * v;
    }
    s.centroids = std::move(next);
    assign_and_repair(s);
    inertia = total_inertia(s);
    result.inertia_history.push_back(inertia);
    const double rel = base > 0.0 ? std::sqrt(shift / base) : std::sqrt(shift);
    if (rel < cfg.tol) break;
  }

  result.centroids = std::move(s.centroids);
  result.assignments = std::move(s.assignments);
  result.inertia = inertia;
  result.iterations = it;
  return result;
}

TargetSet compact_targets(const TargetSet& targets, const KMeansConfig& cfg,
                          std::vector<CompactionReport>* report) {
  cfg.validate();
  TargetSet out;
  out.compacted = true;
  for (const auto& ds : targets.datasets) {
    TargetDataset cds;
    cds.name = ds.name;
    cds.records = ds.records;
    for (const auto& [view, rows] : ds.views) {
      CompactionReport entry{ds.name, view, rows.rows(), rows.rows(), 0.0, 0, false};
      if (rows.rows() <= cfg.k) {
        cds.views.emplace(view, rows);
      } else {
        Clustering cl = kmeans(rows, cfg);
        entry.rows_after = cl.k();
        EmbeddingView centroids{view, std::move(cl.centroids), false};
        cds.views.emplace(view, l2_normalize(std::move(centroids)).rows);
        entry.inertia = cl.inertia;
        entry.iterations = cl.iterations;
        entry.degenerate = cl.degenerate;
      }
      if (report) report->push_back(entry);
    }
    out.datasets.push_back(std::move(cds));
  }
  return out;
}

std::string format_compaction_report(const std::vector<CompactionReport>& report) {
  std::string out = "dataset\tview\trows_before\trows_after\tinertia\titerations\n";
  char buf[256];
  for (const auto& r : report) {
    std::snprintf(buf, sizeof(buf), "%s\t%s\t%zu\t%zu\t%.6f\t%zu%s\n", r.dataset.c_str(),
                  r.view.c_str(), r.rows_before, r.rows_after, r.inertia, r.iterations,
                  r.degenerate ? "\tdegenerate" : "");
    out += buf;
  }
  return out;
}

}  // namespace mmrsel
