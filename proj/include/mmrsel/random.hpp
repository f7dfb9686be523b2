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

#ifndef MMRSEL_RANDOM_HPP_
#define MMRSEL_RANDOM_HPP_

#include <array>
#include <cstdint>
#include <span>

namespace mmrsel {

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
// A counter-based generator: the output block is a pure function of a 64-bit
// key and a 128-bit counter, so any element of a random stream can be computed
// independently and results are identical across platforms and thread counts.
//
// Seeding convention used throughout the library: key = user seed; counter =
// (stream id in the high 64 bits, element index in the low 64 bits). Each
// consumer (projection matrix, k-means++, shuffles, ...) uses its own stream id.
using PhiloxBlock = std::array<std::uint32_t, 4>;

PhiloxBlock philox4x32_10(const PhiloxBlock& counter,
                          std::array<std::uint32_t, 2> key);

PhiloxBlock philox_block(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t index);

// Standard normal computed from the single block (seed, stream, index) via
// Box-Muller. Two 53-bit uniforms come from the two 64-bit halves.
double gaussian_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

namespace streams {
inline constexpr std::uint64_t kProjection = 1;
inline constexpr std::uint64_t kAuditPairs = 2;
inline constexpr std::uint64_t kKMeansInit = 3;
inline constexpr std::uint64_t kShuffle = 4;
inline constexpr std::uint64_t kProbeSplit = 5;
inline constexpr std::uint64_t kFixture = 100;
}  // namespace streams

// Sequential view over one Philox stream.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, n). n must be > 0. Lemire's multiply-and-reject.
  std::uint64_t below(std::uint64_t n);
  double normal();

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t index_ = 0;
  PhiloxBlock buffer_{};
  int buffered_ = 0;  // remaining 64-bit halves in buffer_
};

}  // namespace mmrsel

#endif  // MMRSEL_RANDOM_HPP_
