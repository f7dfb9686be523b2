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

#ifndef MMRSEL_KERNELS_HPP_
#define MMRSEL_KERNELS_HPP_

#include <algorithm>
#include <cstddef>
#include <cstring>
#include <span>
#include <string>

#include "mmrsel/errors.hpp"

namespace mmrsel {

// Every similarity in the library goes through these kernels so that the same
// pair of rows yields the same bits no matter which code path asked for it.
//
// Accumulation order: element j is added into float lane (j % kLanes) for the
// full blocks, the tail goes into lanes 0..rem-1, and the lanes are reduced in
// double in a fixed pairwise tree. The multi-row kernel repeats exactly the
// same per-pair arithmetic. Build with -ffp-contract=off so no FMA changes it.
inline constexpr std::size_t kLanes = 16;

namespace detail {

// GCC/Clang vector extensions; the arithmetic is the same lane by lane as
// the scalar description above, the types only pin down the register shape.
typedef float Lanes __attribute__((vector_size(kLanes * sizeof(float))));
typedef float Half __attribute__((vector_size(kLanes / 2 * sizeof(float))));
typedef double Wide8 __attribute__((vector_size(8 * sizeof(double))));
typedef double Wide4 __attribute__((vector_size(4 * sizeof(double))));
typedef double Wide2 __attribute__((vector_size(2 * sizeof(double))));

inline Lanes load_lanes(const float* p) {
  Lanes v;
  std::memcpy(&v, p, sizeof(v));
  return v;
}

template <typename Out, typename In>
inline Out half_of(const In& v, int which) {
  Out out;
  std::memcpy(&out, reinterpret_cast<const char*>(&v) + which * sizeof(Out), sizeof(Out));
  return out;
}

// Pairwise tree: l[i] += l[i + w] for w = 8, 4, 2, 1, in double.
inline double reduce_lanes(const Lanes& acc) {
  const Wide8 s8 = __builtin_convertvector(half_of<Half>(acc, 0), Wide8) +
                   __builtin_convertvector(half_of<Half>(acc, 1), Wide8);
  const Wide4 s4 = half_of<Wide4>(s8, 0) + half_of<Wide4>(s8, 1);
  const Wide2 s2 = half_of<Wide2>(s4, 0) + half_of<Wide2>(s4, 1);
  return s2[0] + s2[1];
}

inline double finish(Lanes acc, const float* a, const float* b, std::size_t full,
                     std::size_t n) {
  for (std::size_t j = full; j < n; ++j) acc[j - full] += a[j] * b[j];
  return reduce_lanes(acc);
}

}  // namespace detail

inline double dot_unchecked(const float* a, const float* b, std::size_t n) {
  detail::Lanes acc = {};
  const std::size_t full = n - n % kLanes;
  for (std::size_t j = 0; j < full; j += kLanes) {
    acc += detail::load_lanes(a + j) * detail::load_lanes(b + j);
  }
  return detail::finish(acc, a, b, full, n);
}

// out[r * kCols + c] = dot(a[r], b[c]) for a kRows x kCols block of pairs.
// Bit-identical to calling dot_unchecked on each pair; only the register
// reuse differs.
template <std::size_t kRows, std::size_t kCols>
inline void dot_block(const float* const* a, const float* const* b, std::size_t n,
                      double* out) {
  detail::Lanes acc[kRows][kCols] = {};
  const std::size_t full = n - n % kLanes;
  for (std::size_t j = 0; j < full; j += kLanes) {
    detail::Lanes bv[kCols];
    for (std::size_t c = 0; c < kCols; ++c) bv[c] = detail::load_lanes(b[c] + j);
    for (std::size_t r = 0; r < kRows; ++r) {
      const detail::Lanes av = detail::load_lanes(a[r] + j);
      for (std::size_t c = 0; c < kCols; ++c) acc[r][c] += av * bv[c];
    }
  }
  for (std::size_t r = 0; r < kRows; ++r) {
    for (std::size_t c = 0; c < kCols; ++c) {
      out[r * kCols + c] = detail::finish(acc[r][c], a[r], b[c], full, n);
    }
  }
}

// out[r] = dot(rows[r], b) for kRows rows at once.
template <std::size_t kRows>
inline void dot_multi(const float* const* rows, const float* b, std::size_t n,
                      double* out) {
  dot_block<kRows, 1>(rows, &b, n, out);
}

inline double dot(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("dot: lengths " + std::to_string(a.size()) + " and " +
                            std::to_string(b.size()));
  }
  return dot_unchecked(a.data(), b.data(), a.size());
}

inline double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

// Cosine of two unit-or-zero rows: their dot product, clamped to [-1, 1].
// A zero row has dot 0 with everything, which is the defined cosine.
inline double cosine(std::span<const float> a, std::span<const float> b) {
  return clamp_unit(dot(a, b));
}

}  // namespace mmrsel

#endif  // MMRSEL_KERNELS_HPP_
