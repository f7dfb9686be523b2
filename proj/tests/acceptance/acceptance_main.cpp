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


// Acceptance checks. Prints one PASS/FAIL line per criterion; tolerances and
// wall-clock limits are pinned below. `--only N` runs a single criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mmrsel/cli.hpp"
#include "mmrsel/corpus_store.hpp"
#include "mmrsel/fixture.hpp"
#include "mmrsel/io.hpp"
#include "mmrsel/kmeans.hpp"
#include "mmrsel/parallel.hpp"
#include "mmrsel/probe.hpp"
#include "mmrsel/projection.hpp"
#include "mmrsel/random.hpp"
#include "mmrsel/relevance.hpp"
#include "mmrsel/run_manifest.hpp"
#include "mmrsel/selection.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

namespace mmrsel {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

struct Instance {
  std::map<std::string, Matrix> views;
  std::vector<TargetDataset> datasets;
  std::map<std::string, double> weights;
  std::vector<double> durations;
  ViewMap view_map;
  TargetSet targets;
};

Instance random_instance(std::size_t n, std::size_t k_views, std::size_t m_datasets,
                         std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Instance inst;
  const std::size_t dims[] = {8, 12, 16};
  for (std::size_t k = 0; k < k_views; ++k) {
    const std::string name = "v" + std::to_string(k);
    inst.views[name] = oracle::random_unit(n, dims[k], seed * 31 + k);
    inst.weights[name] = std::uniform_real_distribution<double>(0.2, 1.0)(gen);
  }
  for (std::size_t m = 0; m < m_datasets; ++m) {
    TargetDataset ds;
    ds.name = "t" + std::to_string(m);
    const std::size_t rows = 5 + gen() % 40;
    for (std::size_t k = 0; k < k_views; ++k) {
      ds.views["v" + std::to_string(k)] = oracle::random_unit(rows, dims[k], seed * 97 + m * 7 + k);
    }
    inst.targets.datasets.push_back(ds);
  }
  inst.durations = oracle::random_durations(n, 1.0, 20.0, seed + 5);
  inst.view_map = oracle::as_views(inst.views);
  return inst;
}

SelectionConfig make_config(const Instance& inst, double lambda, double alpha, double rho,
                            std::size_t batch, AggregationMode mode = AggregationMode::kMax) {
  SelectionConfig cfg;
  cfg.lambda = lambda;
  cfg.subset_fraction = alpha;
  cfg.prefilter_fraction = rho;
  cfg.batch_size = batch;
  cfg.weights = FusionWeights(inst.weights);
  cfg.aggregation = mode;
  return cfg;
}

// Exact pick-index match between the batched selector (B=1, rho=1) and the
// unbatched reference.
Outcome oracle_equivalence() {
  std::mt19937_64 gen(2026);
  const double lambdas[] = {0.0, 0.3, 0.7, 1.0};
  int mismatches = 0;
  std::size_t total_picks = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 20 + gen() % 481;
    const std::size_t k = 1 + t % 3;
    const std::size_t m = 1 + (t / 3) % 2;
    const double lambda = lambdas[t % 4];
    Instance inst = random_instance(n, k, m, 1000 + t);
    const double alpha = std::uniform_real_distribution<double>(0.02, 0.3)(gen);
    SelectionConfig cfg = make_config(inst, lambda, alpha, 1.0, 1);
    const auto r = relevance_multi_dataset(inst.view_map, inst.targets, cfg.weights, cfg.aggregation);
    const auto exact = greedy_mmr_exact(r, inst.view_map, inst.durations, cfg);
    const auto batched = batched_mmr(r, inst.view_map, inst.durations, cfg);
    if (exact.indices() != batched.indices()) ++mismatches;
    total_picks += exact.picks.size();
  }
  return {mismatches == 0, std::to_string(mismatches) + "/50 instances differ, " +
                               std::to_string(total_picks) + " picks compared"};
}

Outcome lambda_limits() {
  int failures = 0;
  for (int t = 0; t < 20; ++t) {
    Instance inst = random_instance(300, 1 + t % 3, 1 + t % 2, 5000 + t);
    const auto weights = FusionWeights(inst.weights);
    const auto r = relevance_multi_dataset(inst.view_map, inst.targets, weights, AggregationMode::kMax);
    std::vector<std::size_t> order(r.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return r[a] > r[b]; });

    // lambda = 1: relevance order, truncated where the running duration first
    // reaches the budget (rounded up to a whole batch past the seed pick).
    for (std::size_t batch : {1u, 7u}) {
      const auto res = batched_mmr(r, inst.view_map, inst.durations,
                                   make_config(inst, 1.0, 0.1, 1.0, batch));
      const double budget = duration_budget(inst.durations, 0.1);
      std::size_t len = 0;
      double acc = 0.0;
      while (acc < budget) acc += inst.durations[order[len++]];
      len = 1 + ((len - 1 + batch - 1) / batch) * batch;
      const std::vector<std::size_t> want(order.begin(), order.begin() + len);
      if (res.indices() != want) ++failures;
    }

    // lambda = 0: the second pick is least similar to the first.
    const auto res = batched_mmr(r, inst.view_map, inst.durations,
                                 make_config(inst, 0.0, 0.1, 1.0, 1));
    const std::size_t first = order[0];
    std::size_t best = 0;
    double best_v = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i == first) continue;
      const double v = oracle::diversity(i, {first}, inst.views, inst.weights);
      if (v < best_v) {
        best_v = v;
        best = i;
      }
    }
    if (res.picks.size() < 2 || res.picks[0].index != first || res.picks[1].index != best) ++failures;
  }
  return {failures == 0, std::to_string(failures) + " failed checks over 20 instances"};
}

Outcome max_is_union() {
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    Instance inst = random_instance(400, 1, 2 + t % 3, 7000 + t);
    const auto weights = FusionWeights(inst.weights);
    const auto agg = relevance_multi_dataset(inst.view_map, inst.targets, weights, AggregationMode::kMax);
    Matrix merged;
    for (const auto& ds : inst.targets.datasets) merged = Matrix::vstack(merged, ds.views.at("v0"));
    const auto uni = relevance_single(inst.views.at("v0"), merged);
    for (std::size_t i = 0; i < agg.size(); ++i) worst = std::max(worst, std::abs(agg[i] - uni[i]));
  }
  return {worst <= 1e-6, "max |diff| = " + fmt("%.3g", worst) + " (tol 1e-6)"};
}

Outcome cosine_audit() {
  EmbeddingView hi{"hi", gaussian_rows(10000, 3072, 11, streams::kFixture), false};
  const Matrix p = make_projection({3072, 256, 12});
  EmbeddingView lo = project_view(hi, p);
  const double corr = audit_cosine_preservation(hi, lo, 100000, 13);
  return {corr >= 0.90, "pearson = " + fmt("%.4f", corr) + " (need >= 0.90)"};
}

Outcome budget_bounds() {
  std::mt19937_64 gen(99);
  int violations = 0, exhausted = 0;
  const std::size_t batches[] = {1, 4, 16, 64, 256};
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 200 + gen() % 1800;
    Instance inst = random_instance(n, 1 + t % 2, 1, 9000 + t);
    const double alpha = std::uniform_real_distribution<double>(0.01, 0.4)(gen);
    // Every fifth run uses a prefilter too small to reach the budget.
    const double rho = t % 5 == 4 ? alpha / 4.0 : std::uniform_real_distribution<double>(0.3, 1.0)(gen);
    const std::size_t batch = batches[gen() % 5];
    SelectionConfig cfg = make_config(inst, std::uniform_real_distribution<double>(0, 1)(gen),
                                      alpha, rho, batch);
    const auto r = relevance_multi_dataset(inst.view_map, inst.targets, cfg.weights, cfg.aggregation);
    const auto res = batched_mmr(r, inst.view_map, inst.durations, cfg);
    const double budget = duration_budget(inst.durations, alpha);
    const double d_max = *std::max_element(inst.durations.begin(), inst.durations.end());
    double sum = 0.0;
    for (const auto& pk : res.picks) sum += inst.durations[pk.index];
    bool ok = std::abs(sum - res.total_selected_s) <= 1e-9 * sum && res.budget_s == budget;
    if (res.pool_exhausted) {
      ++exhausted;
      ok = ok && res.total_selected_s < budget && res.picks.size() == res.pool_size &&
           !res.warnings.empty();
    } else {
      ok = ok && budget <= res.total_selected_s &&
           res.total_selected_s < budget + static_cast<double>(batch) * d_max;
    }
    if (!ok) ++violations;
  }
  return {violations == 0 && exhausted > 0,
          std::to_string(violations) + " violations in 100 runs (" + std::to_string(exhausted) +
              " flagged pool-exhausted)"};
}

Outcome domain_recovery() {
  const std::size_t n = 5000, clusters = 10, dims = 64;
  const Matrix centers = random_unit_rows(clusters, dims, 21, streams::kFixture);
  std::vector<std::uint32_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<std::uint32_t>(i % clusters);
  CorpusManifest corpus;
  const auto durations = oracle::random_durations(n, 1.0, 20.0, 22);
  for (std::size_t i = 0; i < n; ++i) {
    corpus.records.push_back({"u" + std::to_string(i), durations[i], "src"});
  }
  corpus.views["v"] = EmbeddingView{"v", clustered_rows(centers, labels, 0.1, 23, streams::kFixture + 1), true};
  TargetSet targets;
  TargetDataset ds;
  ds.name = "target";
  ds.views["v"] = clustered_rows(centers, std::vector<std::uint32_t>(300, 0), 0.1, 24,
                                 streams::kFixture + 2);
  targets.datasets.push_back(ds);

  SelectionConfig cfg;
  cfg.lambda = 0.7;
  cfg.subset_fraction = 0.05;
  cfg.batch_size = 32;
  cfg.weights = FusionWeights::single("v");
  const auto mmr = batched_mmr(corpus, targets, cfg);
  auto fraction = [&](const SelectionResult& res) {
    std::size_t hit = 0;
    for (const auto& pk : res.picks) hit += labels[pk.index] == 0;
    return static_cast<double>(hit) / static_cast<double>(res.picks.size());
  };
  const double f_mmr = fraction(mmr);
  double f_rand = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) f_rand += fraction(random_baseline(durations, 0.05, s)) / 5.0;
  return {f_mmr >= 3.0 * f_rand, "target-cluster fraction mmr " + fmt("%.3f", f_mmr) +
                                     " vs random " + fmt("%.3f", f_rand) + " (need >= 3x)"};
}

Matrix separated(std::size_t clusters, std::size_t per, std::size_t dims, double noise,
                 std::uint64_t seed) {
  const Matrix centers = random_unit_rows(clusters, dims, seed, streams::kFixture);
  std::vector<std::uint32_t> labels(clusters * per);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<std::uint32_t>(i % clusters);
  return clustered_rows(centers, labels, noise, seed, streams::kFixture + 1);
}

Outcome probe_sanity() {
  ProbeConfig cfg;
  cfg.clusters = 100;
  cfg.seed = 31;
  EmbeddingView structured{"a", separated(100, 30, 64, 0.03, 31), true};
  const auto labels = pseudo_label(structured, cfg);
  EmbeddingView noise{"b", random_unit_rows(3000, 64, 32, streams::kFixture), true};
  const ProbeReport self = fit_predict(structured, labels, cfg);
  const ProbeReport cross = fit_predict(noise, labels, cfg);

  // Central differences on a small random model.
  std::mt19937_64 gen(33);
  std::normal_distribution<double> normal;
  Matrix x(40, 6);
  for (auto& v : x.values()) v = static_cast<float>(normal(gen));
  std::vector<std::uint32_t> y(40);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<std::uint32_t>(gen() % 5);
  std::vector<std::size_t> rows(40);
  std::iota(rows.begin(), rows.end(), 0);
  SoftmaxModel model(5, 6);
  for (auto& p : model.params) p = 0.5 * normal(gen);
  std::vector<double> grad;
  softmax_loss(x, y, rows, model, 0.05, &grad);
  double worst = 0.0;
  const double h = 1e-5;
  for (std::size_t j = 0; j < model.params.size(); ++j) {
    SoftmaxModel plus = model, minus = model;
    plus.params[j] += h;
    minus.params[j] -= h;
    const double fd = (softmax_loss(x, y, rows, plus, 0.05, nullptr) -
                       softmax_loss(x, y, rows, minus, 0.05, nullptr)) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - grad[j]) / std::max(1.0, std::abs(fd)));
  }
  const bool ok = std::abs(cross.accuracy - cross.chance) <= 0.03 && self.accuracy >= 0.70 &&
                  worst <= 1e-4;
  return {ok, "noise " + fmt("%.3f", cross.accuracy) + " vs chance " + fmt("%.3f", cross.chance) +
                  ", self " + fmt("%.3f", self.accuracy) + ", grad rel err " + fmt("%.2g", worst)};
}

int cli(std::vector<std::string> args, std::string* err = nullptr) {
  std::ostringstream o, e;
  const int code = run_cli(args, o, e);
  if (err) *err = e.str();
  return code;
}

Outcome determinism_and_replay() {
  TempDir dir;
  const std::string fx = (dir / "fx").string();
  if (cli({"stats", "--make-fixture", fx, "--seed", "5"}) != 0) return {false, "fixture failed"};
  const int max_threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::string> digests;
  for (int threads : {1, 4, max_threads}) {
    const fs::path out = dir / ("sel-" + std::to_string(threads) + ".jsonl");
    std::string err;
    if (cli({"select", "--corpus", fx + "/corpus", "--targets", fx + "/targets", "--out",
             out.string(), "--batch", "32", "--threads", std::to_string(threads)},
            &err) != 0) {
      return {false, "select failed: " + err};
    }
    digests.push_back(sha256_file(out));
  }
  const bool same = std::all_of(digests.begin(), digests.end(),
                                [&](const auto& d) { return d == digests[0]; });
  const fs::path first = dir / "sel-1.jsonl";
  std::string err;
  const fs::path replayed = dir / "replayed.jsonl";
  if (cli({"select", "--replay", sidecar_path(first).string(), "--out", replayed.string()}, &err) != 0) {
    return {false, "replay failed: " + err};
  }
  const bool replay_ok = sha256_file(replayed) == load_run_manifest(sidecar_path(first)).output_digest;
  return {same && replay_ok, std::string("threads 1/4/") + std::to_string(max_threads) +
                                 (same ? " identical" : " differ") + ", replay digest " +
                                 (replay_ok ? "matches" : "differs")};
}

Outcome kmeans_contracts() {
  std::string detail;
  bool ok = true;
  // Inertia per iteration.
  const Matrix rows = oracle::random_unit(3000, 32, 41);
  KMeansConfig cfg;
  cfg.k = 50;
  cfg.seed = 41;
  const Clustering c = kmeans(rows, cfg);
  for (std::size_t t = 1; t < c.inertia_history.size(); ++t) {
    ok = ok && c.inertia_history[t] <= c.inertia_history[t - 1];
  }
  detail += std::to_string(c.inertia_history.size()) + " iterations monotone=" + (ok ? "yes" : "no");

  // k = 1 centroid.
  cfg.k = 1;
  const Clustering one = kmeans(rows, cfg);
  double worst = 0.0;
  for (std::size_t j = 0; j < rows.cols(); ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < rows.rows(); ++i) mean += rows(i, j);
    mean /= static_cast<double>(rows.rows());
    worst = std::max(worst, std::abs(mean - one.centroids(0, j)));
  }
  ok = ok && worst <= 1e-6;
  detail += ", k=1 err " + fmt("%.2g", worst);

  // Two blobs.
  std::mt19937_64 gen(42);
  std::normal_distribution<double> noise(0.0, 0.3);
  const double means[2][2] = {{-3.0, 0.0}, {3.0, 1.0}};
  Matrix blobs(1000, 2);
  for (std::size_t i = 0; i < 1000; ++i) {
    for (std::size_t j = 0; j < 2; ++j) blobs(i, j) = static_cast<float>(means[i % 2][j] + noise(gen));
  }
  cfg.k = 2;
  const Clustering two = kmeans(blobs, cfg);
  double blob_err = 0.0;
  for (const auto& m : means) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < 2; ++k) {
      best = std::min(best, std::max(std::abs(two.centroids(k, 0) - m[0]),
                                     std::abs(two.centroids(k, 1) - m[1])));
    }
    blob_err = std::max(blob_err, best);
  }
  ok = ok && blob_err <= 0.05;
  detail += ", blob err " + fmt("%.3f", blob_err);
  return {ok, detail};
}

Outcome throughput() {
  const std::size_t n = 1000000;
  auto t0 = std::chrono::steady_clock::now();
  CorpusManifest corpus;
  corpus.records.reserve(n);
  const auto durations = oracle::random_durations(n, 1.0, 20.0, 51);
  for (std::size_t i = 0; i < n; ++i) corpus.records.push_back({std::to_string(i), durations[i], "src"});
  corpus.views["v"] = EmbeddingView{"v", random_unit_rows(n, 256, 52, streams::kFixture), true};
  TargetSet targets;
  TargetDataset ds;
  ds.name = "target";
  ds.views["v"] = random_unit_rows(200, 256, 53, streams::kFixture);
  targets.datasets.push_back(ds);
  targets.compacted = true;
  const double gen_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  SelectionConfig cfg;
  cfg.subset_fraction = 0.05;
  cfg.prefilter_fraction = 0.15;
  cfg.batch_size = 1024;
  cfg.weights = FusionWeights::single("v");
  t0 = std::chrono::steady_clock::now();
  const auto res = batched_mmr(corpus, targets, cfg);
  const double sel_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = res.total_selected_s >= res.budget_s && !res.pool_exhausted;
  return {ok, std::to_string(res.picks.size()) + " picks in " + std::to_string(res.rounds) +
                  " rounds, selection " + fmt("%.1f", sel_s) + " s (data generation " +
                  fmt("%.1f", gen_s) + " s), " + std::to_string(num_threads()) + " threads"};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "oracle equivalence (B=1, rho=1 vs exact greedy)", 30.0, oracle_equivalence},
      {2, "lambda limit laws", 5.0, lambda_limits},
      {3, "multi-dataset max equals union of targets", 5.0, max_is_union},
      {4, "cosine preservation 3072->256 on isotropic data", 60.0, cosine_audit},
      {5, "duration budget bounds", 10.0, budget_bounds},
      {6, "domain recovery vs random", 30.0, domain_recovery},
      {7, "probe sanity", 60.0, probe_sanity},
      {8, "determinism across workers and replay", 30.0, determinism_and_replay},
      {9, "k-means contracts", 10.0, kmeans_contracts},
      {10, "throughput 1M x 256, 5%", 600.0, throughput},
  };
  return all;
}

}  // namespace
}  // namespace mmrsel

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }
  int failed = 0, ran = 0;
  for (const auto& c : mmrsel::criteria()) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    mmrsel::Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && s < c.limit_s;
    if (!pass) ++failed;
    std::printf("criterion %2d %s  %s: %s [%.1f s, limit %.0f s]\n", c.id, pass ? "PASS" : "FAIL",
                c.name, o.detail.c_str(), s, c.limit_s);
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  return failed == 0 ? 0 : 1;
}
