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

#ifndef MMRSEL_PROBE_HPP_
#define MMRSEL_PROBE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mmrsel/corpus_store.hpp"
#include "mmrsel/relevance.hpp"

namespace mmrsel {

// Cross-embedding predictability probe: cluster one view, then see how well
// a linear softmax classifier recovers those clusters from another view.
struct ProbeConfig {
  std::size_t clusters = 100;
  double train_fraction = 0.8;
  double l2_penalty = 1e-4;
  std::size_t max_epochs = 200;
  // Halved whenever a full-batch step would increase the loss; that step is
  // rejected, so the recorded loss never increases.
  double learning_rate = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ProbeReport {
  std::string source_view;
  std::string target_view;
  double accuracy = 0.0;
  // Majority-class rate on the held-out split (>= 1 / clusters).
  double chance = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t epochs = 0;
  std::vector<double> loss_history;
};

// k-means assignments of the view with k = cfg.clusters. Throws TooFewRows.
std::vector<std::uint32_t> pseudo_label(const EmbeddingView& view, const ProbeConfig& cfg);

// Linear softmax classifier. Row c of the weight block holds the class-c
// weights followed by its bias.
struct SoftmaxModel {
  std::size_t classes = 0;
  std::size_t dims = 0;
  std::vector<double> params;  // classes x (dims + 1)

  SoftmaxModel() = default;
  SoftmaxModel(std::size_t classes, std::size_t dims)
      : classes(classes), dims(dims), params(classes * (dims + 1), 0.0) {}

  double& weight(std::size_t c, std::size_t j) { return params[c * (dims + 1) + j]; }
  double weight(std::size_t c, std::size_t j) const { return params[c * (dims + 1) + j]; }
  double& bias(std::size_t c) { return params[c * (dims + 1) + dims]; }
  double bias(std::size_t c) const { return params[c * (dims + 1) + dims]; }

  std::uint32_t predict(std::span<const float> x) const;
};

// Mean softmax cross-entropy over `rows` plus (l2 / 2) * ||W||^2 (biases are
// not penalized). Writes the gradient with respect to model.params when
// `gradient` is non-null.
double softmax_loss(const Matrix& features, std::span<const std::uint32_t> labels,
                    std::span<const std::size_t> rows, const SoftmaxModel& model, double l2,
                    std::vector<double>* gradient);

// Stratified-as-possible seeded split: every label with at least two samples
// lands in both halves.
void split_train_test(std::span<const std::uint32_t> labels, double train_fraction,
                      std::uint64_t seed, std::vector<std::size_t>& train,
                      std::vector<std::size_t>& test);

// Trains on the train split and reports held-out accuracy. Throws
// DegenerateSplit when a split has fewer than two distinct labels.
ProbeReport fit_predict(const EmbeddingView& source, std::span<const std::uint32_t> labels,
                        const ProbeConfig& cfg);

// Reports for every ordered (source, target) pair, self pairs included,
// source-major in `order` (map order when empty). All pairs share one split
// seed.
std::vector<ProbeReport> probe_matrix(const ViewMap& views, const ProbeConfig& cfg,
                                      const std::vector<std::string>& order = {});

// Source x target accuracy table in percent with one decimal.
std::string format_probe_table(const std::vector<ProbeReport>& reports);

}  // namespace mmrsel

#endif  // MMRSEL_PROBE_HPP_
