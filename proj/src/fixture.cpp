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

#include "mmrsel/fixture.hpp"

#include <cmath>
#include <cstdio>

#include "mmrsel/parallel.hpp"
#include "mmrsel/random.hpp"

namespace fs = std::filesystem;

namespace mmrsel {
namespace {

struct ViewShape {
  const char* name;
  std::size_t dims;
  double noise;
  bool normalized;
};

constexpr ViewShape kViews[] = {
    {"speaker", 1024, 0.045, false},
    {"wavlm", 256, 0.09, true},
    {"sbert", 128, 0.12, true},
};

void normalize_row(std::span<float> r) {
  double sq = 0.0;
  for (float x : r) sq += static_cast<double>(x) * x;
  if (sq == 0.0) return;
  const double inv = 1.0 / std::sqrt(sq);
  for (float& x : r) x = static_cast<float>(x * inv);
}

}  // namespace

Matrix gaussian_rows(std::size_t rows, std::size_t dims, std::uint64_t seed,
                     std::uint64_t stream) {
  Matrix m(rows, dims);
  parallel_for_chunks(rows, 256, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      auto r = m.row(i);
      for (std::size_t j = 0; j < dims; ++j) {
        r[j] = static_cast<float>(gaussian_at(seed, stream, i * dims + j));
      }
    }
  });
  return m;
}

Matrix random_unit_rows(std::size_t rows, std::size_t dims, std::uint64_t seed,
                        std::uint64_t stream) {
  Matrix m = gaussian_rows(rows, dims, seed, stream);
  for (std::size_t i = 0; i < rows; ++i) normalize_row(m.row(i));
  return m;
}

Matrix clustered_rows(const Matrix& centers, const std::vector<std::uint32_t>& labels,
                      double noise, std::uint64_t seed, std::uint64_t stream,
                      bool normalize) {
  const std::size_t d = centers.cols();
  Matrix m = gaussian_rows(labels.size(), d, seed, stream);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto r = m.row(i);
    auto c = centers.row(labels[i]);
    for (std::size_t j = 0; j < d; ++j) r[j] = static_cast<float>(c[j] + noise * r[j]);
    if (normalize) normalize_row(r);
  }
  return m;
}

Fixture make_fixture(const FixtureSpec& spec) {
  Fixture fx;
  Rng rng(spec.seed, streams::kFixture);
  const std::size_t n = spec.utterances;

  fx.source_clusters.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fx.source_clusters[i] = static_cast<std::uint32_t>(rng.below(spec.clusters));
  }
  fx.corpus.records.resize(n);
  char id[32];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(id, sizeof(id), "utt-%07zu", i);
    const double duration = std::round((1.0 + 19.0 * rng.uniform()) * 100.0) / 100.0;
    fx.corpus.records[i] = {id, duration, "shard-" + std::to_string(fx.source_clusters[i] % 3)};
  }

  const std::size_t m = spec.target_datasets;
  fx.targets.datasets.resize(m);
  std::vector<std::uint32_t> target_labels(spec.target_rows);
  for (std::size_t t = 0; t < m; ++t) {
    auto& ds = fx.targets.datasets[t];
    ds.name = "target-" + std::string(1, static_cast<char>('a' + t));
    for (std::size_t i = 0; i < spec.target_rows; ++i) {
      std::snprintf(id, sizeof(id), "%s-%05zu", ds.name.c_str(), i);
      const double duration = std::round((2.0 + 8.0 * rng.uniform()) * 100.0) / 100.0;
      ds.records.push_back({id, duration, ds.name});
    }
  }

  std::uint64_t stream = streams::kFixture + 1;
  for (const auto& shape : kViews) {
    Matrix centers = random_unit_rows(spec.clusters, shape.dims, spec.seed, stream++);
    Matrix rows = clustered_rows(centers, fx.source_clusters, shape.noise, spec.seed,
                                 stream++, shape.normalized);
    fx.corpus.views.emplace(shape.name, EmbeddingView{shape.name, std::move(rows),
                                                      shape.normalized});
    for (std::size_t t = 0; t < m; ++t) {
      std::fill(target_labels.begin(), target_labels.end(),
                static_cast<std::uint32_t>(t % spec.clusters));
      fx.targets.datasets[t].views.emplace(
          shape.name, clustered_rows(centers, target_labels, shape.noise, spec.seed, stream++,
                                     shape.normalized));
    }
  }
  return fx;
}

void write_fixture(const Fixture& fixture, const fs::path& dir) {
  save_corpus(fixture.corpus, dir / "corpus");
  save_targets(fixture.targets, dir / "targets");
}

}  // namespace mmrsel
