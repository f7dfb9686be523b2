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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "mmrsel/random.hpp"

namespace mmrsel {
namespace {

// Known-answer vectors from the Random123 distribution (kat_vectors).
TEST(Philox, KnownAnswerZero) {
  PhiloxBlock out = philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (PhiloxBlock{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerAllOnes) {
  PhiloxBlock out = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                  {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (PhiloxBlock{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
  PhiloxBlock out = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                  {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (PhiloxBlock{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, StreamsAreIndependentCounters) {
  EXPECT_NE(philox_block(7, 1, 0), philox_block(7, 2, 0));
  EXPECT_NE(philox_block(7, 1, 0), philox_block(8, 1, 0));
  EXPECT_EQ(philox_block(7, 1, 12345), philox_block(7, 1, 12345));
}

TEST(Rng, SameSeedSameSequence) {
  Rng a(42, streams::kShuffle), b(42, streams::kShuffle);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, UniformInUnitInterval) {
  Rng rng(3, 9);
  double sum = 0.0;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) {
    double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // Mean of U(0,1) has standard error 1/sqrt(12 n) ~ 9e-4.
  EXPECT_NEAR(sum / kDraws, 0.5, 5e-3);
}

TEST(Rng, BelowIsRoughlyUniform) {
  Rng rng(11, 9);
  std::vector<int> counts(7, 0);
  constexpr int kDraws = 70000;
  for (int i = 0; i < kDraws; ++i) {
    auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  // Expected 10000 per bucket, sd ~ 93.
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(Rng, NormalMoments) {
  Rng rng(5, 9);
  double s1 = 0.0, s2 = 0.0;
  constexpr int kDraws = 200000;
  for (int i = 0; i < kDraws; ++i) {
    double x = rng.normal();
    s1 += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s1 / kDraws, 0.0, 0.01);
  EXPECT_NEAR(s2 / kDraws, 1.0, 0.02);
}

TEST(Rng, GaussianAtMoments) {
  double s1 = 0.0, s2 = 0.0;
  constexpr int kDraws = 200000;
  for (int i = 0; i < kDraws; ++i) {
    double x = gaussian_at(99, streams::kProjection, i);
    s1 += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s1 / kDraws, 0.0, 0.01);
  EXPECT_NEAR(s2 / kDraws, 1.0, 0.02);
}

TEST(Rng, ShuffleIsPermutation) {
  std::vector<int> v(1000);
  std::iota(v.begin(), v.end(), 0);
  Rng(1, streams::kShuffle).shuffle(std::span<int>(v));
  EXPECT_FALSE(std::is_sorted(v.begin(), v.end()));
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(sorted[i], i);
}

}  // namespace
}  // namespace mmrsel
