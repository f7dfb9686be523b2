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

#include "mmrsel/probe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "mmrsel/errors.hpp"
#include "mmrsel/kmeans.hpp"
#include "mmrsel/parallel.hpp"
#include "mmrsel/random.hpp"

namespace mmrsel {
namespace {

constexpr std::size_t kSampleGrain = 256;
constexpr double kMinLearningRate = 1e-10;

std::size_t distinct_labels(std::span<const std::uint32_t> labels,
                            std::span<const std::size_t> rows) {
  std::vector<std::uint32_t> seen;
  for (std::size_t i : rows) seen.push_back(labels[i]);
  std::sort(seen.begin(), seen.end());
  return static_cast<std::size_t>(std::unique(seen.begin(), seen.end()) - seen.begin());
}

// Per-dimension z-scoring with statistics from the training rows only.
// Unit-norm embeddings have per-component scale ~1/sqrt(D), which leaves plain
// gradient descent badly conditioned.
Matrix standardize(const Matrix& x, std::span<const std::size_t> train) {
  const std::size_t d = x.cols();
  std::vector<double> mean(d, 0.0), var(d, 0.0);
  for (std::size_t i : train) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < d; ++j) mean[j] += r[j];
  }
  for (auto& m : mean) m /= static_cast<double>(train.size());
  for (std::size_t i : train) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < d; ++j) var[j] += (r[j] - mean[j]) * (r[j] - mean[j]);
  }
  Matrix out(x.rows(), d);
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(train.size()));
    var[j] = sd > 0.0 ? 1.0 / sd : 0.0;
  }
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = x.row(i);
    auto o = out.row(i);
    for (std::size_t j = 0; j < d; ++j) o[j] = static_cast<float>((r[j] - mean[j]) * var[j]);
  }
  return out;
}

}  // namespace

void ProbeConfig::validate() const {
  if (clusters == 0) throw ConfigError("probe: clusters must be positive");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("probe: train fraction must be in (0, 1)");
  }
  if (!(l2_penalty >= 0.0)) throw ConfigError("probe: l2 penalty must be nonnegative");
  if (max_epochs == 0) throw ConfigError("probe: max epochs must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("probe: learning rate must be positive");
}

std::vector<std::uint32_t> pseudo_label(const EmbeddingView& view, const ProbeConfig& cfg) {
  cfg.validate();
  if (view.size() < cfg.clusters) {
    throw TooFewRows("view \"" + view.name + "\" has " + std::to_string(view.size()) +
                     " rows, fewer than " + std::to_string(cfg.clusters) + " clusters");
  }
  KMeansConfig km;
  km.k = cfg.clusters;
  km.seed = cfg.seed;
  return kmeans(view.rows, km).assignments;
}

std::uint32_t SoftmaxModel::predict(std::span<const float> x) const {
  std::uint32_t best = 0;
  double best_z = -INFINITY;
  for (std::size_t c = 0; c < classes; ++c) {
    double z = bias(c);
    for (std::size_t j = 0; j < dims; ++j) z += weight(c, j) * x[j];
    if (z > best_z) {
      best_z = z;
      best = static_cast<std::uint32_t>(c);
    }
  }
  return best;
}

double softmax_loss(const Matrix& features, std::span<const std::uint32_t> labels,
                    std::span<const std::size_t> rows, const SoftmaxModel& model, double l2,
                    std::vector<double>* gradient) {
  const std::size_t k = model.classes;
  const std::size_t d = model.dims;
  const std::size_t stride = d + 1;
  if (features.cols() != d) throw DimensionMismatch("probe model dims differ from features");
  if (rows.empty()) throw DegenerateSplit("no samples to fit");

  const std::size_t chunks = chunk_count(rows.size(), kSampleGrain);
  std::vector<double> chunk_loss(chunks, 0.0);
  std::vector<std::vector<double>> chunk_grad(gradient ? chunks : 0);

  parallel_for_chunks(rows.size(), kSampleGrain, [&](std::size_t c, std::size_t b, std::size_t e) {
    std::vector<double> z(k);
    std::vector<double>* g = gradient ? &chunk_grad[c] : nullptr;
    if (g) g->assign(k * stride, 0.0);
    double loss = 0.0;
    for (std::size_t r = b; r < e; ++r) {
      const std::size_t i = rows[r];
      auto x = features.row(i);
      double zmax = -INFINITY;
      for (std::size_t cls = 0; cls < k; ++cls) {
        double s = model.bias(cls);
        for (std::size_t j = 0; j < d; ++j) s += model.weight(cls, j) * x[j];
        z[cls] = s;
        zmax = std::max(zmax, s);
      }
      double denom = 0.0;
      for (std::size_t cls = 0; cls < k; ++cls) denom += std::exp(z[cls] - zmax);
      const std::uint32_t y = labels[i];
      loss += std::log(denom) + zmax - z[y];
      if (!g) continue;
      for (std::size_t cls = 0; cls < k; ++cls) {
        const double p = std::exp(z[cls] - zmax) / denom - (cls == y ? 1.0 : 0.0);
        double* dst = g->data() + cls * stride;
        for (std::size_t j = 0; j < d; ++j) dst[j] += p * x[j];
        dst[d] += p;
      }
    }
    chunk_loss[c] = loss;
  });

  const double inv_n = 1.0 / static_cast<double>(rows.size());
  double loss = 0.0;
  for (double l : chunk_loss) loss += l;
  loss *= inv_n;
  double penalty = 0.0;
  for (std::size_t cls = 0; cls < k; ++cls) {
    for (std::size_t j = 0; j < d; ++j) penalty += model.weight(cls, j) * model.weight(cls, j);
  }
  loss += 0.5 * l2 * penalty;

  if (gradient) {
    gradient->assign(k * stride, 0.0);
    for (const auto& part : chunk_grad) {
      for (std::size_t j = 0; j < part.size(); ++j) (*gradient)[j] += part[j];
    }
    for (std::size_t cls = 0; cls < k; ++cls) {
      for (std::size_t j = 0; j <= d; ++j) {
        double& gj = (*gradient)[cls * stride + j];
        gj *= inv_n;
        if (j < d) gj += l2 * model.weight(cls, j);
      }
    }
  }
  return loss;
}

void split_train_test(std::span<const std::uint32_t> labels, double train_fraction,
                      std::uint64_t seed, std::vector<std::size_t>& train,
                      std::vector<std::size_t>& test) {
  std::map<std::uint32_t, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < labels.size(); ++i) by_label[labels[i]].push_back(i);
  Rng rng(seed, streams::kProbeSplit);
  train.clear();
  test.clear();
  for (auto& [label, idx] : by_label) {
    rng.shuffle(std::span<std::size_t>(idx));
    std::size_t n_train = idx.size();
    if (idx.size() >= 2) {
      n_train = static_cast<std::size_t>(
          std::llround(train_fraction * static_cast<double>(idx.size())));
      n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
    }
    train.insert(train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
}

ProbeReport fit_predict(const EmbeddingView& source, std::span<const std::uint32_t> labels,
                        const ProbeConfig& cfg) {
  cfg.validate();
  if (source.size() != labels.size()) {
    throw DimensionMismatch("probe: " + std::to_string(source.size()) + " rows but " +
                            std::to_string(labels.size()) + " labels");
  }
  std::vector<std::size_t> train, test;
  split_train_test(labels, cfg.train_fraction, cfg.seed, train, test);
  if (distinct_labels(labels, train) < 2 || distinct_labels(labels, test) < 2) {
    throw DegenerateSplit("probe: train and held-out splits need at least two labels each");
  }

  const std::size_t classes =
      static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
  const Matrix features = standardize(source.rows, train);
  SoftmaxModel model(classes, source.dims());
  ProbeReport report;
  report.source_view = source.name;
  report.train_size = train.size();
  report.test_size = test.size();

  std::vector<double> grad, trial_grad;
  double loss = softmax_loss(features, labels, train, model, cfg.l2_penalty, &grad);
  report.loss_history.push_back(loss);
  double lr = cfg.learning_rate;
  SoftmaxModel trial = model;
  for (std::size_t epoch = 0; epoch < cfg.max_epochs && lr > kMinLearningRate; ++epoch) {
    for (std::size_t j = 0; j < model.params.size(); ++j) {
      trial.params[j] = model.params[j] - lr * grad[j];
    }
    const double trial_loss =
        softmax_loss(features, labels, train, trial, cfg.l2_penalty, &trial_grad);
    if (trial_loss <= loss) {
      std::swap(model.params, trial.params);
      std::swap(grad, trial_grad);
      loss = trial_loss;
    } else {
      lr *= 0.5;
    }
    report.loss_history.push_back(loss);
    report.epochs = epoch + 1;
  }

  std::size_t correct = 0;
  std::vector<std::size_t> freq(classes, 0);
  for (std::size_t i : test) {
    if (model.predict(features.row(i)) == labels[i]) ++correct;
    ++freq[labels[i]];
  }
  const double n_test = static_cast<double>(test.size());
  report.accuracy = static_cast<double>(correct) / n_test;
  report.chance = static_cast<double>(*std::max_element(freq.begin(), freq.end())) / n_test;
  return report;
}

std::vector<ProbeReport> probe_matrix(const ViewMap& views, const ProbeConfig& cfg,
                                      const std::vector<std::string>& order) {
  std::vector<std::string> names = order;
  if (names.empty()) {
    for (const auto& [name, _] : views) names.push_back(name);
  }
  if (names.size() < 2) throw ConfigError("probe needs at least two views");
  for (const auto& n : names) {
    auto it = views.find(n);
    if (it == views.end()) throw MissingView(n);
    if (it->second.size() != views.at(names.front()).size()) {
      throw DimensionMismatch("probe views have different row counts");
    }
  }
  std::map<std::string, std::vector<std::uint32_t>> labels;
  for (const auto& n : names) labels[n] = pseudo_label(views.at(n), cfg);

  std::vector<ProbeReport> reports;
  for (const auto& src : names) {
    for (const auto& tgt : names) {
      ProbeReport r = fit_predict(views.at(src), labels.at(tgt), cfg);
      r.target_view = tgt;
      reports.push_back(std::move(r));
    }
  }
  return reports;
}

std::string format_probe_table(const std::vector<ProbeReport>& reports) {
  std::vector<std::string> names;
  for (const auto& r : reports) {
    if (std::find(names.begin(), names.end(), r.source_view) == names.end()) {
      names.push_back(r.source_view);
    }
  }
  std::string out = "source\\target";
  for (const auto& n : names) out += "\t" + n;
  out += "\n";
  char buf[64];
  for (const auto& src : names) {
    out += src;
    for (const auto& tgt : names) {
      for (const auto& r : reports) {
        if (r.source_view == src && r.target_view == tgt) {
          std::snprintf(buf, sizeof(buf), "\t%.1f", 100.0 * r.accuracy);
          out += buf;
        }
      }
    }
    out += "\n";
  }
  out += "chance";
  for (const auto& tgt : names) {
    for (const auto& r : reports) {
      if (r.source_view == names.front() && r.target_view == tgt) {
        std::snprintf(buf, sizeof(buf), "\t%.1f", 100.0 * r.chance);
        out += buf;
      }
    }
  }
  out += "\n";
  return out;
}

}  // namespace mmrsel
