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

#include "mmrsel/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "mmrsel/errors.hpp"
#include "mmrsel/kernels.hpp"
#include "mmrsel/parallel.hpp"
#include "mmrsel/random.hpp"

namespace mmrsel {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double mmr_score(double lambda, double relevance, double diversity) {
  return lambda * relevance - (1.0 - lambda) * diversity;
}

// Orders (score, index) pairs best first: higher score, then lower index.
struct BetterScore {
  bool operator()(const std::pair<double, std::size_t>& a,
                  const std::pair<double, std::size_t>& b) const {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  }
};

void check_inputs(const RelevanceVector& relevance, const ViewMap& views,
                  std::span<const double> durations, const SelectionConfig& cfg) {
  cfg.validate();
  if (relevance.empty()) throw EmptyCorpus("no candidates to select from");
  if (durations.size() != relevance.size()) {
    throw DimensionMismatch("durations and relevance lengths differ");
  }
  if (cfg.weights.empty()) throw ConfigError("weights: no views to score diversity with");
  for (const auto& name : cfg.weights.names()) {
    auto it = views.find(name);
    if (it == views.end()) throw MissingView(name);
    if (it->second.size() != relevance.size()) {
      throw DimensionMismatch("view \"" + name + "\" is not aligned with the candidates");
    }
  }
}

class Recorder {
 public:
  explicit Recorder(SelectionResult& result) : result_(result) {}

  void commit(std::size_t index, double r, double v, double m, double duration) {
    total_ += duration;
    result_.picks.push_back({result_.picks.size(), index, r, v, m, total_});
    result_.total_selected_s = total_;
  }
  double total() const { return total_; }

 private:
  SelectionResult& result_;
  double total_ = 0.0;
};

const Matrix& view_rows(const ViewMap& views, const std::string& name) {
  return views.at(name).rows;
}

}  // namespace

void SelectionConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ConfigError("lambda must be in [0, 1], got " + std::to_string(lambda));
  }
  if (!(subset_fraction > 0.0 && subset_fraction <= 1.0)) {
    throw ConfigError("subset fraction (alpha) must be in (0, 1], got " +
                      std::to_string(subset_fraction));
  }
  if (!(prefilter_fraction > 0.0 && prefilter_fraction <= 1.0)) {
    throw ConfigError("prefilter fraction (rho) must be in (0, 1], got " +
                      std::to_string(prefilter_fraction));
  }
  if (batch_size == 0) throw ConfigError("batch size must be at least 1");
}

std::vector<std::size_t> SelectionResult::indices() const {
  std::vector<std::size_t> out;
  out.reserve(picks.size());
  for (const auto& p : picks) out.push_back(p.index);
  return out;
}

double duration_budget(std::span<const double> durations, double alpha) {
  double total = 0.0;
  for (double d : durations) total += d;
  return alpha * total;
}

std::size_t prefilter_size(std::size_t n, double rho) {
  if (n == 0) return 0;
  const double x = rho * static_cast<double>(n);
  const double nearest = std::round(x);
  // rho * n that is an integer up to rounding (0.15 * 1e6) should not round up.
  const double count =
      std::abs(x - nearest) <= 1e-9 * std::max(1.0, x) ? nearest : std::ceil(x);
  return std::clamp<std::size_t>(static_cast<std::size_t>(count), 1, n);
}

std::vector<std::size_t> relevance_prefilter(std::span<const double> relevance,
                                             std::size_t count) {
  count = std::min(count, relevance.size());
  std::vector<std::pair<double, std::size_t>> keyed(relevance.size());
  for (std::size_t i = 0; i < relevance.size(); ++i) keyed[i] = {relevance[i], i};
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(count),
                    keyed.end(), BetterScore{});
  std::vector<std::size_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = keyed[i].second;
  return out;
}

SelectionResult greedy_mmr_exact(const RelevanceVector& relevance, const ViewMap& views,
                                 std::span<const double> durations,
                                 const SelectionConfig& cfg) {
  check_inputs(relevance, views, durations, cfg);
  const std::size_t n = relevance.size();
  const auto& entries = cfg.weights.entries();

  SelectionResult result;
  result.budget_s = duration_budget(durations, cfg.subset_fraction);
  result.pool_size = n;
  Recorder rec(result);

  std::vector<bool> taken(n, false);
  std::vector<std::vector<double>> running(entries.size(), std::vector<double>(n, kNegInf));

  std::size_t first = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (relevance[i] > relevance[first]) first = i;
  }
  taken[first] = true;
  rec.commit(first, relevance[first], 0.0, mmr_score(cfg.lambda, relevance[first], 0.0),
             durations[first]);
  std::size_t last = first;

  while (rec.total() < result.budget_s) {
    if (result.picks.size() == n) {
      result.pool_exhausted = true;
      break;
    }
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const Matrix& rows = view_rows(views, entries[k].first);
      for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i]) {
          running[k][i] = std::max(running[k][i], cosine(rows.row(i), rows.row(last)));
        }
      }
    }
    std::size_t best = n;
    double best_m = kNegInf, best_v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      const double v = combine_weighted(cfg.weights, running, i);
      const double m = mmr_score(cfg.lambda, relevance[i], v);
      if (best == n || m > best_m) {
        best = i;
        best_m = m;
        best_v = v;
      }
    }
    taken[best] = true;
    rec.commit(best, relevance[best], best_v, best_m, durations[best]);
    ++result.rounds;
    last = best;
  }
  return result;
}

SelectionResult batched_mmr(const RelevanceVector& relevance, const ViewMap& views,
                            std::span<const double> durations, const SelectionConfig& cfg) {
  check_inputs(relevance, views, durations, cfg);
  const std::size_t n = relevance.size();
  const auto& entries = cfg.weights.entries();

  SelectionResult result;
  result.budget_s = duration_budget(durations, cfg.subset_fraction);
  const std::size_t pool_size = prefilter_size(n, cfg.prefilter_fraction);
  result.pool_size = pool_size;
  const auto expected_picks =
      static_cast<std::size_t>(std::ceil(cfg.subset_fraction * static_cast<double>(n)));
  if (pool_size < 2 * expected_picks) {
    result.warnings.push_back("prefilter pool of " + std::to_string(pool_size) +
                              " candidates is less than twice the expected " +
                              std::to_string(expected_picks) + " picks");
  }
  Recorder rec(result);

  std::vector<std::size_t> pool = relevance_prefilter(relevance, pool_size);
  const std::size_t seed = pool.front();
  rec.commit(seed, relevance[seed], 0.0, mmr_score(cfg.lambda, relevance[seed], 0.0),
             durations[seed]);

  // Remaining candidates and their per-view running max similarity to the
  // committed set, kept aligned and compacted after every round.
  std::vector<std::size_t> remaining(pool.begin() + 1, pool.end());
  std::vector<std::vector<double>> running(entries.size(),
                                           std::vector<double>(remaining.size(), kNegInf));
  std::vector<std::size_t> last_batch = {seed};
  std::vector<std::pair<double, std::size_t>> scored;
  std::vector<double> diversity;

  while (rec.total() < result.budget_s) {
    if (remaining.empty()) {
      result.pool_exhausted = true;
      break;
    }
    for (std::size_t k = 0; k < entries.size(); ++k) {
      update_running_max(view_rows(views, entries[k].first), remaining, last_batch,
                         running[k]);
    }
    scored.resize(remaining.size());
    diversity.resize(remaining.size());
    parallel_for_chunks(remaining.size(), 4096, [&](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t p = b; p < e; ++p) {
        const std::size_t i = remaining[p];
        diversity[p] = combine_weighted(cfg.weights, running, p);
        scored[p] = {mmr_score(cfg.lambda, relevance[i], diversity[p]), p};
      }
    });
    const std::size_t take = std::min(cfg.batch_size, remaining.size());
    // Positions follow pool order, which is not index order, so compare on
    // the corpus index for the tie-break.
    auto better = [&](const std::pair<double, std::size_t>& a,
                      const std::pair<double, std::size_t>& b) {
      if (a.first != b.first) return a.first > b.first;
      return remaining[a.second] < remaining[b.second];
    };
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                      scored.end(), better);

    std::vector<bool> committed(remaining.size(), false);
    last_batch.clear();
    for (std::size_t t = 0; t < take; ++t) {
      const std::size_t p = scored[t].second;
      const std::size_t i = remaining[p];
      rec.commit(i, relevance[i], diversity[p], scored[t].first, durations[i]);
      committed[p] = true;
      last_batch.push_back(i);
    }
    ++result.rounds;

    std::size_t w = 0;
    for (std::size_t p = 0; p < remaining.size(); ++p) {
      if (committed[p]) continue;
      remaining[w] = remaining[p];
      for (auto& run : running) run[w] = run[p];
      ++w;
    }
    remaining.resize(w);
    for (auto& run : running) run.resize(w);
  }
  return result;
}

SelectionResult batched_mmr(const CorpusManifest& corpus, const TargetSet& targets,
                            const SelectionConfig& cfg) {
  cfg.validate();
  if (corpus.size() == 0) throw EmptyCorpus("corpus has no utterances");
  if (targets.datasets.empty()) throw EmptyTargets("no target datasets");
  targets.validate(cfg.weights.names());
  RelevanceVector r =
      relevance_multi_dataset(corpus.views, targets, cfg.weights, cfg.aggregation);
  return batched_mmr(r, corpus.views, corpus.durations(), cfg);
}

SelectionResult random_baseline(std::span<const double> durations, double alpha,
                                std::uint64_t seed) {
  if (durations.empty()) throw EmptyCorpus("no candidates to select from");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError("subset fraction (alpha) must be in (0, 1]");
  }
  SelectionResult result;
  result.budget_s = duration_budget(durations, alpha);
  result.pool_size = durations.size();
  Recorder rec(result);
  std::vector<std::size_t> order(durations.size());
  std::iota(order.begin(), order.end(), 0);
  Rng(seed, streams::kShuffle).shuffle(std::span<std::size_t>(order));
  for (std::size_t i : order) {
    if (rec.total() >= result.budget_s) break;
    rec.commit(i, 0.0, 0.0, 0.0, durations[i]);
  }
  result.pool_exhausted = rec.total() < result.budget_s;
  return result;
}

std::vector<double> quantile_edges(std::vector<double> values, std::size_t bins) {
  if (values.empty()) throw EmptyTargets("no target durations");
  if (bins == 0) throw ConfigError("bins must be at least 1");
  std::sort(values.begin(), values.end());
  std::vector<double> edges;
  const double last = static_cast<double>(values.size() - 1);
  for (std::size_t q = 1; q < bins; ++q) {
    const double pos = last * static_cast<double>(q) / static_cast<double>(bins);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    edges.push_back(values[lo] + frac * (values[hi] - values[lo]));
  }
  return edges;
}

std::size_t bin_of(const std::vector<double>& edges, double value) {
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), value) -
                                  edges.begin());
}

SelectionResult duration_baseline(std::span<const double> durations,
                                  std::span<const double> target_durations, double alpha,
                                  std::uint64_t seed, std::size_t bins) {
  if (durations.empty()) throw EmptyCorpus("no candidates to select from");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError("subset fraction (alpha) must be in (0, 1]");
  }
  const auto edges =
      quantile_edges(std::vector<double>(target_durations.begin(), target_durations.end()),
                     bins);

  std::vector<double> mass(bins, 0.0);
  double target_total = 0.0;
  for (double d : target_durations) {
    mass[bin_of(edges, d)] += d;
    target_total += d;
  }

  SelectionResult result;
  result.budget_s = duration_budget(durations, alpha);
  result.pool_size = durations.size();
  Recorder rec(result);

  // Same permutation as random_baseline; each bin lists its members in
  // permutation order.
  std::vector<std::size_t> order(durations.size());
  std::iota(order.begin(), order.end(), 0);
  Rng(seed, streams::kShuffle).shuffle(std::span<std::size_t>(order));
  std::vector<std::vector<std::size_t>> members(bins);
  for (std::size_t i : order) members[bin_of(edges, durations[i])].push_back(i);

  std::vector<double> alloc(bins), taken(bins, 0.0);
  for (std::size_t b = 0; b < bins; ++b) alloc[b] = result.budget_s * (mass[b] / target_total);
  std::vector<std::size_t> next(bins, 0);

  auto nearest_open = [&](std::size_t from) -> std::size_t {
    for (std::size_t dist = 1; dist < bins; ++dist) {
      if (from >= dist && next[from - dist] < members[from - dist].size()) return from - dist;
      if (from + dist < bins && next[from + dist] < members[from + dist].size()) {
        return from + dist;
      }
    }
    return bins;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t b = 0; b < bins; ++b) {
      while (taken[b] < alloc[b] && next[b] < members[b].size()) {
        const std::size_t i = members[b][next[b]++];
        taken[b] += durations[i];
        rec.commit(i, 0.0, 0.0, 0.0, durations[i]);
        changed = true;
      }
      if (taken[b] < alloc[b]) {
        const std::size_t spill = nearest_open(b);
        if (spill == bins) continue;
        alloc[spill] += alloc[b] - taken[b];
        alloc[b] = taken[b];
        changed = true;
      }
    }
  }
  result.pool_exhausted = rec.total() < result.budget_s;
  return result;
}

std::string encode_selection(const SelectionResult& result,
                             const std::vector<UtteranceRecord>& records) {
  std::string out;
  for (const auto& p : result.picks) {
    nlohmann::ordered_json j;
    j["rank"] = p.rank;
    j["id"] = records.at(p.index).id;
    j["relevance"] = p.relevance;
    j["diversity"] = p.diversity;
    j["mmr"] = p.mmr;
    j["cumulative_duration_s"] = p.cumulative_duration_s;
    out += j.dump();
    out += '\n';
  }
  nlohmann::ordered_json footer;
  footer["footer"] = true;
  footer["T"] = result.budget_s;
  footer["total_selected_s"] = result.total_selected_s;
  footer["pool_size"] = result.pool_size;
  footer["rounds"] = result.rounds;
  footer["pool_exhausted"] = result.pool_exhausted;
  out += footer.dump();
  out += '\n';
  return out;
}

}  // namespace mmrsel
