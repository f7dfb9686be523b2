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
#include <random>
#include <set>

#include "mmrsel/errors.hpp"
#include "mmrsel/kmeans.hpp"
#include "mmrsel/parallel.hpp"
#include "oracles.hpp"

namespace mmrsel {
namespace {

double brute_sq(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.cols(); ++c) {
    const double t = static_cast<double>(a(i, c)) - b(j, c);
    s += t * t;
  }
  return s;
}

// Two blobs of `per` points around (+-5, 0, ..., 0), sigma 0.1.
Matrix two_blobs(std::size_t per, std::size_t dims, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<float> noise(0.0f, 0.1f);
  Matrix m(2 * per, dims);
  for (std::size_t i = 0; i < 2 * per; ++i) {
    for (std::size_t c = 0; c < dims; ++c) m(i, c) = noise(gen);
    m(i, 0) += i < per ? 5.0f : -5.0f;
  }
  return m;
}

std::vector<double> mean_of(const Matrix& m, std::size_t begin, std::size_t end) {
  std::vector<double> mean(m.cols(), 0.0);
  for (std::size_t i = begin; i < end; ++i) {
    for (std::size_t c = 0; c < m.cols(); ++c) mean[c] += m(i, c);
  }
  for (auto& x : mean) x /= static_cast<double>(end - begin);
  return mean;
}

Matrix gaussian_mixture(std::size_t n, std::size_t dims, std::size_t centers, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<float> normal;
  Matrix c(centers, dims);
  for (auto& x : c.values()) x = 3.0f * normal(gen);
  Matrix m(n, dims);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < dims; ++j) m(i, j) = c(i % centers, j) + normal(gen);
  }
  return m;
}

TEST(KMeans, KEqualsNIsExactCover) {
  Matrix rows = oracle::random_unit(12, 5, 1);
  Clustering cl = kmeans(rows, {12, 100, 1e-4, 3});
  EXPECT_EQ(cl.k(), 12u);
  EXPECT_EQ(cl.inertia, 0.0);
  std::set<std::uint32_t> labels(cl.assignments.begin(), cl.assignments.end());
  EXPECT_EQ(labels.size(), 12u);
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_EQ(brute_sq(rows, i, cl.centroids, cl.assignments[i]), 0.0);
  }
}

TEST(KMeans, KOneIsArithmeticMean) {
  Matrix rows = gaussian_mixture(301, 7, 3, 2);
  Clustering cl = kmeans(rows, {1, 100, 1e-4, 5});
  ASSERT_EQ(cl.k(), 1u);
  auto mean = mean_of(rows, 0, rows.rows());
  for (std::size_t c = 0; c < 7; ++c) EXPECT_NEAR(cl.centroids(0, c), mean[c], 1e-6);
  double inertia = 0.0;
  for (std::size_t i = 0; i < rows.rows(); ++i) inertia += brute_sq(rows, i, cl.centroids, 0);
  EXPECT_NEAR(cl.inertia, inertia, 1e-9 * inertia);
}

TEST(KMeans, TwoBlobRecovery) {
  Matrix rows = two_blobs(100, 8, 7);
  Clustering cl = kmeans(rows, {2, 100, 1e-4, 11});
  ASSERT_EQ(cl.k(), 2u);
  auto pos = mean_of(rows, 0, 100);
  auto neg = mean_of(rows, 100, 200);
  const std::size_t cp = cl.centroids(0, 0) > 0 ? 0 : 1;
  for (std::size_t c = 0; c < 8; ++c) {
    EXPECT_NEAR(cl.centroids(cp, c), pos[c], 0.05);
    EXPECT_NEAR(cl.centroids(1 - cp, c), neg[c], 0.05);
  }
  for (std::size_t i = 0; i < 200; ++i) {
    EXPECT_EQ(cl.assignments[i], i < 100 ? cp : 1 - cp);
  }
}

TEST(KMeans, InertiaNonIncreasing) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    Matrix rows = gaussian_mixture(2000, 16, 12, seed);
    Clustering cl = kmeans(rows, {20, 100, 0.0, seed});
    ASSERT_GE(cl.inertia_history.size(), 2u);
    for (std::size_t t = 1; t < cl.inertia_history.size(); ++t) {
      EXPECT_LE(cl.inertia_history[t], cl.inertia_history[t - 1]) << "seed " << seed << " step " << t;
    }
    EXPECT_EQ(cl.inertia, cl.inertia_history.back());
  }
}

TEST(KMeans, NoEmptyClustersAndNearestCentroid) {
  Matrix rows = gaussian_mixture(1500, 10, 8, 9);
  Clustering cl = kmeans(rows, {40, 50, 1e-4, 9});
  ASSERT_EQ(cl.k(), 40u);
  std::vector<std::size_t> sizes(40, 0);
  for (auto a : cl.assignments) {
    ASSERT_LT(a, 40u);
    ++sizes[a];
  }
  for (std::size_t c = 0; c < 40; ++c) EXPECT_GT(sizes[c], 0u) << c;
  double inertia = 0.0;
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    const double own = brute_sq(rows, i, cl.centroids, cl.assignments[i]);
    inertia += own;
    for (std::size_t c = 0; c < 40; ++c) {
      EXPECT_LE(own, brute_sq(rows, i, cl.centroids, c) + 1e-9) << i;
    }
  }
  EXPECT_NEAR(cl.inertia, inertia, 1e-9 * inertia);
}

TEST(KMeans, RepairsEmptyClusters) {
  // Five tight points far apart plus many duplicates: k-means++ picks distinct
  // rows so every cluster starts with a member, but this also exercises the
  // path where k approaches the distinct row count.
  Matrix rows(30, 2);
  for (std::size_t i = 0; i < 30; ++i) {
    rows(i, 0) = static_cast<float>(i % 6);
    rows(i, 1) = static_cast<float>((i % 6) * (i % 6));
  }
  Clustering cl = kmeans(rows, {6, 100, 1e-4, 1});
  std::set<std::uint32_t> labels(cl.assignments.begin(), cl.assignments.end());
  EXPECT_EQ(labels.size(), 6u);
  EXPECT_EQ(cl.inertia, 0.0);
}

TEST(KMeans, DeterministicInSeedAndThreads) {
  Matrix rows = gaussian_mixture(9000, 12, 10, 4);
  const int saved = num_threads();
  set_num_threads(1);
  Clustering a = kmeans(rows, {25, 30, 1e-4, 77});
  set_num_threads(4);
  Clustering b = kmeans(rows, {25, 30, 1e-4, 77});
  set_num_threads(saved);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.centroids, b.centroids);
  EXPECT_EQ(a.inertia, b.inertia);
}

TEST(KMeans, AllRowsIdenticalFallsBackToOneCluster) {
  Matrix rows(10, 3);
  for (std::size_t i = 0; i < 10; ++i) rows(i, 1) = 0.5f;
  Clustering cl = kmeans(rows, {4, 100, 1e-4, 1});
  EXPECT_TRUE(cl.degenerate);
  EXPECT_EQ(cl.k(), 1u);
  EXPECT_EQ(cl.inertia, 0.0);
}

TEST(KMeans, ConfigValidation) {
  Matrix rows = oracle::random_unit(4, 2, 1);
  EXPECT_THROW(kmeans(rows, {0, 100, 1e-4, 1}), ConfigError);
  EXPECT_THROW(kmeans(rows, {1, 0, 1e-4, 1}), ConfigError);
  EXPECT_THROW(kmeans(rows, {1, 10, -1.0, 1}), ConfigError);
  EXPECT_THROW(kmeans(Matrix(0, 2), {1, 10, 1e-4, 1}), TooFewRows);
}

TEST(KMeans, SquaredDistanceMatchesBruteForce) {
  Matrix a = oracle::random_unit(3, 37, 5);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_NEAR(squared_distance(a.row(i).data(), a.row(j).data(), 37), brute_sq(a, i, a, j),
                  1e-12);
    }
  }
}

TargetSet one_dataset(std::map<std::string, Matrix> views) {
  TargetSet t;
  t.datasets.push_back({"d", std::move(views), {}});
  return t;
}

TEST(Compaction, PassThroughWhenRowsAtMostK) {
  Matrix rows = oracle::random_unit(150, 8, 1);
  std::vector<CompactionReport> report;
  TargetSet out = compact_targets(one_dataset({{"x", rows}}), {200, 100, 1e-4, 1}, &report);
  EXPECT_TRUE(out.compacted);
  EXPECT_EQ(out.datasets[0].views.at("x"), rows);
  ASSERT_EQ(report.size(), 1u);
  EXPECT_EQ(report[0].rows_before, 150u);
  EXPECT_EQ(report[0].rows_after, 150u);
}

TEST(Compaction, ExactlyKUnitRowsPerView) {
  TargetSet in = one_dataset({{"x", oracle::random_unit(10000, 16, 2)},
                              {"y", oracle::random_unit(10000, 8, 3)}});
  TargetSet out = compact_targets(in, {200, 20, 1e-4, 1});
  for (const auto& [name, rows] : out.datasets[0].views) {
    EXPECT_EQ(rows.rows(), 200u) << name;
    EXPECT_LE(rows.rows(), in.datasets[0].views.at(name).rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      EXPECT_NEAR(oracle::dot(rows, i, rows, i), 1.0, 1e-5);
    }
  }
}

TEST(Compaction, ThreeCopiesOfOneVector) {
  Matrix rows(3, 4);
  for (std::size_t i = 0; i < 3; ++i) {
    rows(i, 0) = 0.5f;
    rows(i, 1) = 0.5f;
    rows(i, 2) = 0.5f;
    rows(i, 3) = 0.5f;
  }
  TargetSet out = compact_targets(one_dataset({{"x", rows}}), {1, 100, 1e-4, 1});
  const Matrix& c = out.datasets[0].views.at("x");
  ASSERT_EQ(c.rows(), 1u);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(c(0, j), 0.5, 1e-6);
}

TEST(Compaction, ReportFormat) {
  std::vector<CompactionReport> r = {{"d", "x", 300, 50, 1.5, 4, false}};
  EXPECT_EQ(format_compaction_report(r),
            "dataset\tview\trows_before\trows_after\tinertia\titerations\n"
            "d\tx\t300\t50\t1.500000\t4\n");
}

}  // namespace
}  // namespace mmrsel
