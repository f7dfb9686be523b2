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

#include "mmrsel/relevance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmrsel/errors.hpp"
#include "mmrsel/kernels.hpp"
#include "mmrsel/parallel.hpp"

namespace mmrsel {
namespace {

constexpr std::size_t kCandidateGrain = 256;
constexpr std::size_t kGroup = 4;

// running[i] = max(running[i], max_o clamp(dot(cand[i], others[o]))).
void running_max_block(const float* const* cand, std::size_t n_cand,
                       const float* const* others, std::size_t n_others,
                       std::size_t dim, double* running) {
  std::size_t i = 0;
  for (; i + kGroup <= n_cand; i += kGroup) {
    double best[kGroup];
    for (std::size_t r = 0; r < kGroup; ++r) best[r] = running[i + r];
    double out[kGroup * kGroup];
    std::size_t o = 0;
    for (; o + kGroup <= n_others; o += kGroup) {
      dot_block<kGroup, kGroup>(cand + i, others + o, dim, out);
      for (std::size_t r = 0; r < kGroup; ++r) {
        for (std::size_t c = 0; c < kGroup; ++c) {
          best[r] = std::max(best[r], clamp_unit(out[r * kGroup + c]));
        }
      }
    }
    for (; o < n_others; ++o) {
      dot_multi<kGroup>(cand + i, others[o], dim, out);
      for (std::size_t r = 0; r < kGroup; ++r) best[r] = std::max(best[r], clamp_unit(out[r]));
    }
    for (std::size_t r = 0; r < kGroup; ++r) running[i + r] = best[r];
  }
  for (; i < n_cand; ++i) {
    double best = running[i];
    for (std::size_t o = 0; o < n_others; ++o) {
      best = std::max(best, clamp_unit(dot_unchecked(cand[i], others[o], dim)));
    }
    running[i] = best;
  }
}

std::vector<const float*> row_pointers(const Matrix& m) {
  std::vector<const float*> ptrs(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) ptrs[i] = m.row(i).data();
  return ptrs;
}

const EmbeddingView& find_view(const ViewMap& views, const std::string& name) {
  auto it = views.find(name);
  if (it == views.end()) throw MissingView(name);
  return it->second;
}

}  // namespace

FusionWeights::FusionWeights(const std::map<std::string, double>& raw) {
  double total = 0.0;
  for (const auto& [name, w] : raw) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ConfigError("weight for view \"" + name + "\" must be finite and nonnegative");
    }
    total += w;
  }
  if (!(total > 0.0)) throw ConfigError("at least one fusion weight must be positive");
  for (const auto& [name, w] : raw) {
    if (w > 0.0) entries_.emplace_back(name, w / total);
  }
}

FusionWeights FusionWeights::uniform(const std::vector<std::string>& names) {
  std::map<std::string, double> raw;
  for (const auto& n : names) raw[n] = 1.0;
  return FusionWeights(raw);
}

FusionWeights FusionWeights::parse(std::string_view text) {
  return FusionWeights(parse_weight_spec(text));
}

std::map<std::string, double> parse_weight_spec(std::string_view text) {
  std::map<std::string, double> raw;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) continue;
    std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ConfigError("weights: expected name=value, got \"" + std::string(item) + "\"");
    }
    std::string name(item.substr(0, eq));
    std::string value(item.substr(eq + 1));
    double w = 0.0;
    try {
      std::size_t used = 0;
      w = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw ConfigError("weights: bad value \"" + value + "\" for view \"" + name + "\"");
    }
    if (!raw.emplace(name, w).second) {
      throw ConfigError("weights: view \"" + name + "\" given twice");
    }
  }
  return raw;
}

std::vector<std::string> FusionWeights::names() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.first);
  return out;
}

std::string_view to_string(AggregationMode mode) {
  return mode == AggregationMode::kMax ? "max" : "mean";
}

AggregationMode parse_aggregation(std::string_view text) {
  if (text == "max") return AggregationMode::kMax;
  if (text == "mean") return AggregationMode::kMean;
  throw ConfigError("aggregation must be max or mean, got \"" + std::string(text) + "\"");
}

RelevanceVector relevance_single(const Matrix& candidates, const Matrix& targets) {
  if (targets.rows() == 0) throw EmptyTargets("relevance needs at least one target row");
  if (candidates.cols() != targets.cols()) {
    throw DimensionMismatch("candidates have " + std::to_string(candidates.cols()) +
                            " dims, targets " + std::to_string(targets.cols()));
  }
  const auto target_ptrs = row_pointers(targets);
  RelevanceVector scores(candidates.rows(), -std::numeric_limits<double>::infinity());
  parallel_for_chunks(candidates.rows(), kCandidateGrain,
                      [&](std::size_t, std::size_t b, std::size_t e) {
                        std::vector<const float*> cand(e - b);
                        for (std::size_t i = b; i < e; ++i) cand[i - b] = candidates.row(i).data();
                        running_max_block(cand.data(), cand.size(), target_ptrs.data(),
                                          target_ptrs.size(), candidates.cols(),
                                          scores.data() + b);
                      });
  return scores;
}

RelevanceVector relevance_fused(const ViewMap& views, const TargetViews& targets,
                                const FusionWeights& weights) {
  if (weights.empty()) throw ConfigError("no fusion weights");
  RelevanceVector fused;
  for (const auto& [name, w] : weights.entries()) {
    const EmbeddingView& view = find_view(views, name);
    auto t = targets.find(name);
    if (t == targets.end()) throw MissingView(name);
    RelevanceVector r = relevance_single(view.rows, t->second);
    if (fused.empty()) fused.assign(r.size(), 0.0);
    if (r.size() != fused.size()) throw DimensionMismatch("views disagree on candidate count");
    for (std::size_t i = 0; i < r.size(); ++i) fused[i] += w * r[i];
  }
  for (double& s : fused) s = clamp_unit(s);
  return fused;
}

RelevanceVector relevance_multi_dataset(const ViewMap& views, const TargetSet& targets,
                                        const FusionWeights& weights,
                                        AggregationMode mode) {
  if (targets.datasets.empty()) throw EmptyTargetSet("target set has no datasets");
  RelevanceVector out;
  for (const auto& ds : targets.datasets) {
    RelevanceVector r = relevance_fused(views, ds.views, weights);
    if (out.empty()) {
      out = std::move(r);
      continue;
    }
    for (std::size_t i = 0; i < r.size(); ++i) {
      out[i] = mode == AggregationMode::kMax ? std::max(out[i], r[i]) : out[i] + r[i];
    }
  }
  if (mode == AggregationMode::kMean) {
    const double m = static_cast<double>(targets.datasets.size());
    for (double& s : out) s /= m;
  }
  return out;
}

double diversity_penalty(std::size_t candidate, std::span<const std::size_t> selected,
                         const ViewMap& views, const FusionWeights& weights) {
  if (selected.empty()) throw EmptySelection("diversity needs a nonempty selected set");
  std::vector<std::vector<double>> per_view;
  for (const auto& [name, w] : weights.entries()) {
    const EmbeddingView& view = find_view(views, name);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t s : selected) {
      best = std::max(best, cosine(view.rows.row(candidate), view.rows.row(s)));
    }
    per_view.push_back({best});
  }
  return combine_weighted(weights, per_view, 0);
}

void update_running_max(const Matrix& rows, std::span<const std::size_t> candidates,
                        std::span<const std::size_t> added, std::span<double> running) {
  if (running.size() != candidates.size()) {
    throw DimensionMismatch("running max array does not match the candidate list");
  }
  if (added.empty() || candidates.empty()) return;
  std::vector<const float*> added_ptrs(added.size());
  for (std::size_t s = 0; s < added.size(); ++s) added_ptrs[s] = rows.row(added[s]).data();
  parallel_for_chunks(candidates.size(), 64, [&](std::size_t, std::size_t b, std::size_t e) {
    const float* cand[64];
    for (std::size_t i = b; i < e; ++i) cand[i - b] = rows.row(candidates[i]).data();
    running_max_block(cand, e - b, added_ptrs.data(), added_ptrs.size(), rows.cols(),
                      running.data() + b);
  });
}

double combine_weighted(const FusionWeights& weights,
                        const std::vector<std::vector<double>>& per_view, std::size_t p) {
  double v = 0.0;
  const auto& entries = weights.entries();
  for (std::size_t k = 0; k < entries.size(); ++k) v += entries[k].second * per_view[k][p];
  return clamp_unit(v);
}

}  // namespace mmrsel
