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

#include "mmrsel/projection.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mmrsel/errors.hpp"
#include "mmrsel/kernels.hpp"
#include "mmrsel/parallel.hpp"
#include "mmrsel/random.hpp"

namespace mmrsel {

void ProjectionSpec::validate() const {
  if (input_dim == 0 || output_dim == 0) {
    throw InvalidDims("projection dimensions must be positive");
  }
  if (output_dim > input_dim) {
    throw InvalidDims("output_dim " + std::to_string(output_dim) +
                      " exceeds input_dim " + std::to_string(input_dim));
  }
}

Matrix make_projection(const ProjectionSpec& spec) {
  spec.validate();
  Matrix m(spec.input_dim, spec.output_dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.output_dim));
  std::uint64_t index = 0;
  for (std::size_t r = 0; r < spec.input_dim; ++r) {
    for (std::size_t c = 0; c < spec.output_dim; ++c, ++index) {
      m(r, c) = static_cast<float>(gaussian_at(spec.seed, streams::kProjection, index) * scale);
    }
  }
  return m;
}

Matrix project_rows(const Matrix& rows, const Matrix& projection) {
  if (rows.cols() != projection.rows()) {
    throw DimensionMismatch("view has " + std::to_string(rows.cols()) +
                            " dims but the projection expects " +
                            std::to_string(projection.rows()));
  }
  const std::size_t in = projection.rows();
  const std::size_t out = projection.cols();
  Matrix result(rows.rows(), out);
  parallel_for_chunks(rows.rows(), 64, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> acc(out);
    for (std::size_t i = begin; i < end; ++i) {
      std::fill(acc.begin(), acc.end(), 0.0);
      auto x = rows.row(i);
      for (std::size_t r = 0; r < in; ++r) {
        const double xr = x[r];
        if (xr == 0.0) continue;
        auto p = projection.row(r);
        for (std::size_t c = 0; c < out; ++c) acc[c] += xr * p[c];
      }
      auto dst = result.row(i);
      for (std::size_t c = 0; c < out; ++c) dst[c] = static_cast<float>(acc[c]);
    }
  });
  return result;
}

EmbeddingView project_view(const EmbeddingView& view, const Matrix& projection) {
  EmbeddingView out{view.name, project_rows(view.rows, projection), false};
  return l2_normalize(std::move(out));
}

double audit_cosine_preservation(const EmbeddingView& view_hi,
                                 const EmbeddingView& view_lo,
                                 std::size_t pair_count, std::uint64_t seed) {
  const std::size_t n = view_hi.size();
  if (view_lo.size() != n) {
    throw DimensionMismatch("audit: views have " + std::to_string(n) + " and " +
                            std::to_string(view_lo.size()) + " rows");
  }
  if (n < 2) throw TooFewRows("audit needs at least two rows");
  if (pair_count == 0) throw ConfigError("audit needs a positive pair count");

  auto norms = [](const Matrix& m) {
    std::vector<double> out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) out[i] = std::sqrt(dot(m.row(i), m.row(i)));
    return out;
  };
  const auto norm_hi = norms(view_hi.rows);
  const auto norm_lo = norms(view_lo.rows);
  auto cos = [](const Matrix& m, const std::vector<double>& nrm, std::size_t i,
                std::size_t j) {
    const double denom = nrm[i] * nrm[j];
    return denom == 0.0 ? 0.0 : clamp_unit(dot(m.row(i), m.row(j)) / denom);
  };

  Rng rng(seed, streams::kAuditPairs);
  std::vector<double> a(pair_count), b(pair_count);
  for (std::size_t p = 0; p < pair_count; ++p) {
    std::size_t i = rng.below(n);
    std::size_t j = rng.below(n - 1);
    if (j >= i) ++j;
    a[p] = cos(view_hi.rows, norm_hi, i, j);
    b[p] = cos(view_lo.rows, norm_lo, i, j);
  }

  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t p = 0; p < pair_count; ++p) {
    mean_a += a[p];
    mean_b += b[p];
  }
  mean_a /= static_cast<double>(pair_count);
  mean_b /= static_cast<double>(pair_count);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t p = 0; p < pair_count; ++p) {
    const double da = a[p] - mean_a;
    const double db = b[p] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace mmrsel
