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

#ifndef MMRSEL_PROJECTION_HPP_
#define MMRSEL_PROJECTION_HPP_

#include <cstddef>
#include <cstdint>

#include "mmrsel/corpus_store.hpp"
#include "mmrsel/matrix.hpp"

namespace mmrsel {

struct ProjectionSpec {
  std::size_t input_dim = 0;
  std::size_t output_dim = 256;
  std::uint64_t seed = 0;

  // Throws InvalidDims unless 0 < output_dim <= input_dim.
  void validate() const;
};

// input_dim x output_dim Gaussian matrix with entries N(0, 1/output_dim).
// Entry (r, c) is gaussian_at(seed, streams::kProjection, r * output_dim + c)
// scaled by 1/sqrt(output_dim), so the matrix depends on nothing but the spec.
Matrix make_projection(const ProjectionSpec& spec);

// Rows multiplied by `projection` (accumulated in double), then L2-normalized.
// Throws DimensionMismatch if view.dims() != projection.rows().
EmbeddingView project_view(const EmbeddingView& view, const Matrix& projection);

// Same product without the final normalization; used to check linearity.
Matrix project_rows(const Matrix& rows, const Matrix& projection);

// Pearson correlation between the cosines of `pair_count` random row pairs
// (i != j) measured in both views. Cosines are computed from the raw rows,
// so neither view needs to be normalized. Throws TooFewRows if the views have
// fewer than two rows, DimensionMismatch if their row counts differ.
double audit_cosine_preservation(const EmbeddingView& view_hi,
                                 const EmbeddingView& view_lo,
                                 std::size_t pair_count, std::uint64_t seed);

}  // namespace mmrsel

#endif  // MMRSEL_PROJECTION_HPP_
