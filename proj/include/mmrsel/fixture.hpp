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

#ifndef MMRSEL_FIXTURE_HPP_
#define MMRSEL_FIXTURE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mmrsel/corpus_store.hpp"
#include "mmrsel/matrix.hpp"

namespace mmrsel {

// Rows with i.i.d. standard normal entries from Philox stream `stream`.
Matrix gaussian_rows(std::size_t rows, std::size_t dims, std::uint64_t seed,
                     std::uint64_t stream);

// Unit rows drawn uniformly on the sphere.
Matrix random_unit_rows(std::size_t rows, std::size_t dims, std::uint64_t seed,
                        std::uint64_t stream);

// Rows scattered around `centers`: row i = normalize(centers[labels[i]] +
// noise * N(0, I)). With normalize=false the sum is kept as is.
Matrix clustered_rows(const Matrix& centers, const std::vector<std::uint32_t>& labels,
                      double noise, std::uint64_t seed, std::uint64_t stream,
                      bool normalize = true);

struct FixtureSpec {
  std::size_t utterances = 2000;
  std::size_t clusters = 10;
  std::size_t target_datasets = 2;
  std::size_t target_rows = 300;
  std::uint64_t seed = 1;
};

struct Fixture {
  CorpusManifest corpus;
  TargetSet targets;
  // Latent cluster of every source utterance; target dataset m is drawn from
  // cluster m.
  std::vector<std::uint32_t> source_clusters;
};

// A small synthetic stand-in for a speech corpus with three views:
// "speaker" (1024 dims, unnormalized, meant to be projected), "wavlm" (256)
// and "sbert" (128). Each view has its own cluster geometry over the same
// latent clusters, so the views share structure but not noise.
Fixture make_fixture(const FixtureSpec& spec);

// Writes <dir>/corpus and <dir>/targets.
void write_fixture(const Fixture& fixture, const std::filesystem::path& dir);

}  // namespace mmrsel

#endif  // MMRSEL_FIXTURE_HPP_
