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

#include "mmrsel/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mmrsel/corpus_store.hpp"
#include "mmrsel/errors.hpp"
#include "mmrsel/fixture.hpp"
#include "mmrsel/io.hpp"
#include "mmrsel/kmeans.hpp"
#include "mmrsel/parallel.hpp"
#include "mmrsel/probe.hpp"
#include "mmrsel/projection.hpp"
#include "mmrsel/random.hpp"
#include "mmrsel/run_manifest.hpp"
#include "mmrsel/selection.hpp"

namespace fs = std::filesystem;

namespace mmrsel {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const CLI::Validator kOpenUnitInterval(
    [](std::string& s) -> std::string {
      double v = 0.0;
      try {
        v = std::stod(s);
      } catch (...) {
        return "value " + s + " is not a number";
      }
      if (!(v > 0.0 && v <= 1.0)) return "value " + s + " not in range (0, 1]";
      return {};
    },
    "(0,1]");

class PhaseTimer {
 public:
  double lap() {
    auto now = std::chrono::steady_clock::now();
    double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::string absolute_string(const fs::path& p) { return fs::weakly_canonical(fs::absolute(p)).string(); }

void add_threads_option(CLI::App* sub, int& threads) {
  sub->add_option("--threads", threads, "Worker cap (0 = MMRSEL_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
}

void apply_threads(int threads) { set_num_threads(threads); }

void record_digest(RunManifest& m, const fs::path& p) {
  m.input_digests[absolute_string(p)] = sha256_file(p);
}

void record_dir_digests(RunManifest& m, const fs::path& dir, bool recursive) {
  std::vector<fs::path> files;
  if (recursive) {
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
  } else {
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
  }
  for (const auto& f : files) {
    auto ext = f.extension();
    if (ext == kViewExtension || f.filename() == kManifestFile ||
        f.filename() == kTargetsMetaFile) {
      record_digest(m, f);
    }
  }
}

// ---------------------------------------------------------------- project

struct ProjectOptions {
  std::string in, out;
  std::size_t dim = 256;
  std::uint64_t seed = 0;
  int threads = 0;
};

int cmd_project(const ProjectOptions& o, std::ostream& out) {
  apply_threads(o.threads);
  PhaseTimer timer;
  RunManifest m;
  m.command = "project";
  ProjectionSpec spec{read_view_header(o.in).dims, o.dim, o.seed};
  spec.validate();
  EmbeddingView view = load_view(o.in);
  m.phase_seconds["load"] = timer.lap();
  EmbeddingView projected = project_view(view, make_projection(spec));
  m.phase_seconds["project"] = timer.lap();
  const std::string bytes = encode_view(projected);
  write_file_atomic(o.out, bytes);
  m.phase_seconds["write"] = timer.lap();

  m.config["in"] = absolute_string(o.in);
  m.config["out"] = absolute_string(o.out);
  m.config["input_dim"] = spec.input_dim;
  m.config["dim"] = spec.output_dim;
  m.config["seed"] = spec.seed;
  m.config["threads"] = num_threads();
  m.seeds["projection"] = spec.seed;
  record_digest(m, o.in);
  m.output_path = absolute_string(o.out);
  m.output_digest = sha256_hex(bytes);
  emit_run_manifest(m);
  out << "projected " << projected.size() << " rows from " << spec.input_dim << " to "
      << spec.output_dim << " dims -> " << o.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- audit

struct AuditOptions {
  std::string hi, lo;
  std::size_t pairs = 100000;
  std::uint64_t seed = 0;
  int threads = 0;
};

int cmd_audit(const AuditOptions& o, std::ostream& out) {
  apply_threads(o.threads);
  EmbeddingView hi = load_view(o.hi);
  EmbeddingView lo = load_view(o.lo);
  const double corr = audit_cosine_preservation(hi, lo, o.pairs, o.seed);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f\n", corr);
  out << buf;
  return kExitOk;
}

// ---------------------------------------------------------- compact-targets

struct CompactOptions {
  std::string targets, out;
  std::size_t k = 200;
  std::size_t max_iters = 100;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  bool medoids = false;
  int threads = 0;
};

int cmd_compact(const CompactOptions& o, std::ostream& out) {
  if (o.medoids) {
    throw UsageError("--medoids is reserved; only centroid compaction is supported");
  }
  apply_threads(o.threads);
  PhaseTimer timer;
  RunManifest m;
  m.command = "compact-targets";
  TargetSet targets = load_targets(o.targets);
  m.phase_seconds["load"] = timer.lap();

  KMeansConfig cfg;
  cfg.k = o.k;
  cfg.max_iters = o.max_iters;
  cfg.tol = o.tol;
  cfg.seed = o.seed;
  std::vector<CompactionReport> report;
  TargetSet compacted = compact_targets(targets, cfg, &report);
  m.phase_seconds["kmeans"] = timer.lap();

  // Build the whole directory beside the destination, then swap it in.
  const fs::path dest(o.out);
  fs::path staging = dest;
  staging += ".tmp." + std::to_string(::getpid());
  fs::remove_all(staging);
  save_targets(compacted, staging);
  const std::string report_text = format_compaction_report(report);
  write_file_atomic(staging / "compaction_report.txt", report_text);
  if (fs::exists(dest)) fs::remove_all(dest);
  fs::rename(staging, dest);
  m.phase_seconds["write"] = timer.lap();

  m.config["targets"] = absolute_string(o.targets);
  m.config["out"] = absolute_string(o.out);
  m.config["k"] = cfg.k;
  m.config["max_iters"] = cfg.max_iters;
  m.config["tol"] = cfg.tol;
  m.config["seed"] = cfg.seed;
  m.config["init"] = "k-means++";
  m.config["threads"] = num_threads();
  m.seeds["kmeans"] = cfg.seed;
  record_dir_digests(m, o.targets, true);
  m.output_path = absolute_string(dest);
  m.output_digest = sha256_hex(report_text);
  emit_run_manifest(m);
  out << report_text;
  return kExitOk;
}

// ---------------------------------------------------------------- select

struct SelectOptions {
  std::string corpus, targets, method = "mmr", weights, aggregate = "max", out;
  double lambda = 0.7;
  double alpha = 0.05;
  double rho = 0.15;
  std::size_t batch = 1024;
  std::size_t bins = 20;
  std::uint64_t seed = 0;
  bool no_normalize = false;
  std::string replay;
  int threads = 0;
};

nlohmann::ordered_json weights_json(const std::map<std::string, double>& raw) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : raw) j[k] = v;
  return j;
}

SelectOptions select_options_from_manifest(const RunManifest& m) {
  if (m.command != "select") throw UsageError("--replay: manifest is not from a select run");
  const auto& c = m.config;
  try {
    SelectOptions o;
    o.corpus = c.at("corpus").get<std::string>();
    o.targets = c.value("targets", std::string{});
    o.method = c.at("method").get<std::string>();
    o.lambda = c.at("lambda").get<double>();
    o.alpha = c.at("alpha").get<double>();
    o.rho = c.at("rho").get<double>();
    o.batch = c.at("batch").get<std::size_t>();
    o.bins = c.at("bins").get<std::size_t>();
    o.aggregate = c.at("aggregate").get<std::string>();
    o.seed = c.at("seed").get<std::uint64_t>();
    o.no_normalize = !c.at("normalize").get<bool>();
    o.out = c.at("out").get<std::string>();
    std::string spec;
    for (const auto& [k, v] : c.at("weights").items()) {
      std::ostringstream s;
      s.precision(17);
      s << v.get<double>();
      spec += (spec.empty() ? "" : ",") + k + "=" + s.str();
    }
    o.weights = spec;
    return o;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("run manifest config is incomplete: ") + e.what());
  }
}

void verify_replay_inputs(const RunManifest& m) {
  for (const auto& [path, digest] : m.input_digests) {
    if (!fs::exists(path)) throw IoError("replay input missing: " + path);
    if (sha256_file(path) != digest) {
      throw Error("replay input changed since the recorded run: " + path);
    }
  }
}

std::vector<std::string> list_view_names(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == kViewExtension) {
      names.push_back(e.path().stem().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

int cmd_select(SelectOptions o, std::ostream& out, std::ostream& err) {
  if (!o.replay.empty()) {
    RunManifest recorded = load_run_manifest(o.replay);
    verify_replay_inputs(recorded);
    const std::string out_override = o.out;
    const int threads = o.threads;
    o = select_options_from_manifest(recorded);
    if (!out_override.empty()) o.out = out_override;
    o.threads = threads;
  }
  if (o.corpus.empty()) throw UsageError("--corpus is required");
  if (o.out.empty()) throw UsageError("--out is required");
  if (o.method != "mmr" && o.method != "random" && o.method != "duration") {
    throw UsageError("--method must be mmr, random or duration");
  }
  if ((o.method == "mmr" || o.method == "duration") && o.targets.empty()) {
    throw UsageError("--targets is required for --method " + o.method);
  }
  SelectionConfig cfg;
  cfg.lambda = o.lambda;
  cfg.subset_fraction = o.alpha;
  cfg.prefilter_fraction = o.rho;
  cfg.batch_size = o.batch;
  cfg.seed = o.seed;
  cfg.aggregation = parse_aggregation(o.aggregate);
  std::map<std::string, double> raw_weights;
  if (!o.weights.empty()) {
    raw_weights = parse_weight_spec(o.weights);
  } else {
    if (!fs::is_directory(o.corpus)) throw IoError("corpus directory not found: " + o.corpus);
    for (const auto& n : list_view_names(o.corpus)) raw_weights[n] = 1.0;
  }
  cfg.weights = FusionWeights(raw_weights);
  cfg.validate();
  if (o.bins == 0) throw UsageError("--bins must be at least 1");
  apply_threads(o.threads);

  PhaseTimer timer;
  RunManifest m;
  m.command = "select";
  LoadOptions lo;
  lo.normalize = !o.no_normalize;
  if (o.method == "mmr") lo.views = cfg.weights.names();
  CorpusManifest corpus = load_corpus(o.corpus, lo);
  TargetSet targets;
  if (!o.targets.empty() && o.method != "random") targets = load_targets(o.targets, lo);
  m.phase_seconds["load"] = timer.lap();

  SelectionResult result;
  if (o.method == "mmr") {
    result = batched_mmr(corpus, targets, cfg);
  } else if (o.method == "random") {
    result = random_baseline(corpus.durations(), cfg.subset_fraction, cfg.seed);
  } else {
    auto target_durations = targets.all_durations();
    if (target_durations.empty()) {
      throw EmptyTargets("--method duration needs manifest.jsonl files in the target datasets");
    }
    result = duration_baseline(corpus.durations(), target_durations, cfg.subset_fraction,
                               cfg.seed, o.bins);
  }
  m.phase_seconds["select"] = timer.lap();
  for (const auto& w : result.warnings) err << "warning: " << w << "\n";

  const std::string text = encode_selection(result, corpus.records);
  write_file_atomic(o.out, text);
  m.phase_seconds["write"] = timer.lap();

  m.config["corpus"] = absolute_string(o.corpus);
  m.config["targets"] = o.targets.empty() ? std::string() : absolute_string(o.targets);
  m.config["method"] = o.method;
  m.config["lambda"] = cfg.lambda;
  m.config["alpha"] = cfg.subset_fraction;
  m.config["rho"] = cfg.prefilter_fraction;
  m.config["batch"] = cfg.batch_size;
  m.config["weights"] = weights_json(raw_weights);
  m.config["aggregate"] = std::string(to_string(cfg.aggregation));
  m.config["bins"] = o.bins;
  m.config["seed"] = cfg.seed;
  m.config["normalize"] = !o.no_normalize;
  m.config["out"] = absolute_string(o.out);
  m.config["threads"] = num_threads();
  m.seeds["baseline"] = cfg.seed;
  record_dir_digests(m, o.corpus, false);
  if (!o.targets.empty() && o.method != "random") record_dir_digests(m, o.targets, true);
  m.output_path = absolute_string(o.out);
  m.output_digest = sha256_hex(text);
  emit_run_manifest(m);

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "selected %zu of %zu utterances: %.2f h (budget %.2f h), pool %zu, %zu rounds%s\n",
                result.picks.size(), corpus.size(), result.total_selected_s / 3600.0,
                result.budget_s / 3600.0, result.pool_size, result.rounds,
                result.pool_exhausted ? ", pool exhausted" : "");
  out << buf;
  return kExitOk;
}

// ---------------------------------------------------------------- probe

struct ProbeOptions {
  std::string corpus, views;
  std::size_t clusters = 100;
  double train_fraction = 0.8;
  double l2 = 1e-4;
  std::size_t epochs = 200;
  double lr = 0.1;
  std::size_t max_rows = 0;
  std::uint64_t seed = 0;
  int threads = 0;
};

int cmd_probe(const ProbeOptions& o, std::ostream& out) {
  ProbeConfig cfg;
  cfg.clusters = o.clusters;
  cfg.train_fraction = o.train_fraction;
  cfg.l2_penalty = o.l2;
  cfg.max_epochs = o.epochs;
  cfg.learning_rate = o.lr;
  cfg.seed = o.seed;
  cfg.validate();
  apply_threads(o.threads);

  std::vector<std::string> order;
  if (!o.views.empty()) {
    std::stringstream ss(o.views);
    for (std::string item; std::getline(ss, item, ',');) {
      if (!item.empty()) order.push_back(item);
    }
  }
  LoadOptions lo;
  lo.views = order;
  CorpusManifest corpus = load_corpus(o.corpus, lo);
  ViewMap views = corpus.views;
  if (o.max_rows > 0 && o.max_rows < corpus.size()) {
    std::vector<std::size_t> idx(corpus.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Rng(o.seed, streams::kShuffle).shuffle(std::span<std::size_t>(idx));
    idx.resize(o.max_rows);
    std::sort(idx.begin(), idx.end());
    for (auto& [name, v] : views) v.rows = v.rows.gather(idx);
  }
  auto reports = probe_matrix(views, cfg, order);
  out << format_probe_table(reports);
  return kExitOk;
}

// ---------------------------------------------------------------- stats

struct StatsOptions {
  std::string corpus, make_fixture;
  std::size_t fixture_size = 2000;
  std::uint64_t seed = 1;
  int threads = 0;
};

int cmd_stats(const StatsOptions& o, std::ostream& out) {
  apply_threads(o.threads);
  if (!o.make_fixture.empty()) {
    FixtureSpec spec;
    spec.utterances = o.fixture_size;
    spec.seed = o.seed;
    write_fixture(make_fixture(spec), o.make_fixture);
    out << "wrote synthetic fixture (" << spec.utterances << " utterances) to "
        << o.make_fixture << "\n";
    return kExitOk;
  }
  if (o.corpus.empty()) throw UsageError("stats needs --corpus or --make-fixture");
  const fs::path dir(o.corpus);
  auto records = load_manifest(dir / kManifestFile);
  std::map<std::string, std::pair<std::size_t, double>> per_dataset;
  double total = 0.0;
  for (const auto& r : records) {
    auto& e = per_dataset[r.dataset];
    ++e.first;
    e.second += r.duration_s;
    total += r.duration_s;
  }
  char buf[256];
  out << "utterances: " << records.size() << "\n";
  std::snprintf(buf, sizeof(buf), "total_hours: %.4f\n", total / 3600.0);
  out << buf << "datasets:\n";
  for (const auto& [name, e] : per_dataset) {
    std::snprintf(buf, sizeof(buf), "  %s: %zu utterances, %.4f h\n", name.c_str(), e.first,
                  e.second / 3600.0);
    out << buf;
  }
  out << "views:\n";
  for (const auto& name : list_view_names(dir)) {
    ViewHeader h = read_view_header(dir / (name + kViewExtension));
    if (h.rows != records.size()) {
      throw DimensionMismatch("view \"" + name + "\" has " + std::to_string(h.rows) +
                              " rows but the manifest has " + std::to_string(records.size()));
    }
    out << "  " << name << ": " << h.dims << " dims" << (h.normalized ? ", normalized" : "")
        << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Target-aware corpus subset selection with batched greedy MMR", "mmrsel"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  ProjectOptions project;
  auto* sp = app.add_subcommand("project", "Gaussian random projection of a view file");
  sp->add_option("--in", project.in, "Input view (.emb)")->required()->check(CLI::ExistingFile);
  sp->add_option("--out", project.out, "Output view (.emb)")->required();
  sp->add_option("--dim", project.dim, "Output dimensionality")->capture_default_str()
      ->check(CLI::PositiveNumber);
  sp->add_option("--seed", project.seed, "Projection seed")->capture_default_str();
  add_threads_option(sp, project.threads);

  AuditOptions audit;
  auto* sa = app.add_subcommand("audit", "Pairwise-cosine correlation between two views");
  sa->add_option("--hi", audit.hi, "Original view")->required()->check(CLI::ExistingFile);
  sa->add_option("--lo", audit.lo, "Projected view")->required()->check(CLI::ExistingFile);
  sa->add_option("--pairs", audit.pairs, "Sampled pairs")->capture_default_str()
      ->check(CLI::PositiveNumber);
  sa->add_option("--seed", audit.seed, "Pair sampling seed")->capture_default_str();
  add_threads_option(sa, audit.threads);

  CompactOptions compact;
  auto* sc = app.add_subcommand("compact-targets", "k-means compaction of target embeddings");
  sc->add_option("--targets", compact.targets, "Targets directory")->required()
      ->check(CLI::ExistingDirectory);
  sc->add_option("--out", compact.out, "Output directory")->required();
  sc->add_option("--k", compact.k, "Clusters per dataset and view")->capture_default_str()
      ->check(CLI::PositiveNumber);
  sc->add_option("--max-iters", compact.max_iters, "Lloyd iteration cap")
      ->capture_default_str()->check(CLI::PositiveNumber);
  sc->add_option("--tol", compact.tol, "Relative centroid shift tolerance")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  sc->add_option("--seed", compact.seed, "k-means++ seed")->capture_default_str();
  sc->add_flag("--medoids", compact.medoids, "Reserved: use nearest real rows");
  add_threads_option(sc, compact.threads);

  SelectOptions select;
  auto* ss = app.add_subcommand("select", "Select a duration-budgeted subset");
  ss->add_option("--corpus", select.corpus, "Corpus directory");
  ss->add_option("--targets", select.targets, "Targets directory");
  ss->add_option("--method", select.method, "mmr, random or duration")->capture_default_str()
      ->check(CLI::IsMember({"mmr", "random", "duration"}));
  ss->add_option("--lambda", select.lambda, "Relevance/diversity trade-off")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  ss->add_option("--alpha", select.alpha, "Subset fraction of total duration")
      ->capture_default_str()->check(kOpenUnitInterval);
  ss->add_option("--rho", select.rho, "Relevance prefilter fraction")->capture_default_str()
      ->check(kOpenUnitInterval);
  ss->add_option("--batch", select.batch, "Picks committed per round")->capture_default_str()
      ->check(CLI::PositiveNumber);
  ss->add_option("--weights", select.weights, "Per-view weights, e.g. speaker=1,wavlm=1");
  ss->add_option("--aggregate", select.aggregate, "max or mean over target datasets")
      ->capture_default_str()->check(CLI::IsMember({"max", "mean"}));
  ss->add_option("--bins", select.bins, "Duration baseline quantile bins")
      ->capture_default_str()->check(CLI::PositiveNumber);
  ss->add_option("--seed", select.seed, "Baseline seed")->capture_default_str();
  ss->add_option("--out", select.out, "Selection output (.jsonl)");
  ss->add_flag("--no-normalize", select.no_normalize, "Use views as stored (no L2 normalization)");
  ss->add_option("--replay", select.replay, "Rerun from a recorded run manifest")
      ->check(CLI::ExistingFile);
  add_threads_option(ss, select.threads);

  ProbeOptions probe;
  auto* spr = app.add_subcommand("probe", "Cross-embedding predictability probe");
  spr->add_option("--corpus", probe.corpus, "Corpus directory")->required()
      ->check(CLI::ExistingDirectory);
  spr->add_option("--views", probe.views, "Comma-separated views (default: all)");
  spr->add_option("--clusters", probe.clusters, "Pseudo-label clusters")->capture_default_str()
      ->check(CLI::PositiveNumber);
  spr->add_option("--train-fraction", probe.train_fraction, "Train split fraction")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  spr->add_option("--l2", probe.l2, "L2 penalty")->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  spr->add_option("--epochs", probe.epochs, "Gradient descent epochs")->capture_default_str()
      ->check(CLI::PositiveNumber);
  spr->add_option("--lr", probe.lr, "Initial learning rate")->capture_default_str()
      ->check(CLI::PositiveNumber);
  spr->add_option("--max-rows", probe.max_rows, "Random subsample size (0 = all rows)")
      ->capture_default_str();
  spr->add_option("--seed", probe.seed, "Clustering and split seed")->capture_default_str();
  add_threads_option(spr, probe.threads);

  StatsOptions stats;
  auto* st = app.add_subcommand("stats", "Corpus summary, or write a synthetic fixture");
  st->add_option("--corpus", stats.corpus, "Corpus directory")->check(CLI::ExistingDirectory);
  st->add_option("--make-fixture", stats.make_fixture, "Write a synthetic fixture here");
  st->add_option("--fixture-size", stats.fixture_size, "Fixture utterance count")
      ->capture_default_str()->check(CLI::PositiveNumber);
  st->add_option("--seed", stats.seed, "Fixture seed")->capture_default_str();
  add_threads_option(st, stats.threads);

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("mmrsel");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (sp->parsed()) return cmd_project(project, out);
    if (sa->parsed()) return cmd_audit(audit, out);
    if (sc->parsed()) return cmd_compact(compact, out);
    if (ss->parsed()) return cmd_select(select, out, err);
    if (spr->parsed()) return cmd_probe(probe, out);
    if (st->parsed()) return cmd_stats(stats, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace mmrsel
