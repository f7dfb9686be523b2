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

#ifndef MMRSEL_CORPUS_STORE_HPP_
#define MMRSEL_CORPUS_STORE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mmrsel/matrix.hpp"

namespace mmrsel {

// One embedding space over the corpus: row i belongs to utterance i.
struct EmbeddingView {
  std::string name;
  Matrix rows;
  bool normalized = false;

  std::size_t dims() const { return rows.cols(); }
  std::size_t size() const { return rows.rows(); }

  // Throws NonFiniteEntry, or NotNormalized when `normalized` is set but a
  // nonzero row's norm is off by more than 1e-4.
  void validate() const;
};

struct UtteranceRecord {
  std::string id;
  double duration_s = 0.0;
  std::string dataset;

  friend bool operator==(const UtteranceRecord&, const UtteranceRecord&) = default;
};

struct CorpusManifest {
  std::vector<UtteranceRecord> records;
  std::map<std::string, EmbeddingView> views;

  std::size_t size() const { return records.size(); }
  std::vector<double> durations() const;
  double total_duration() const;
  const EmbeddingView& view(const std::string& name) const;

  // At least one view, all views aligned with records.
  void validate() const;
};

struct TargetDataset {
  std::string name;
  std::map<std::string, Matrix> views;
  // Original target utterances, when a manifest was given. Only the duration
  // baseline reads these; they are not row-aligned after compaction.
  std::vector<UtteranceRecord> records;
};

struct TargetSet {
  std::vector<TargetDataset> datasets;
  bool compacted = false;

  // Every dataset has a nonempty matrix for each of `view_names`.
  void validate(const std::vector<std::string>& view_names) const;
  std::vector<double> all_durations() const;
};

inline constexpr char kEmbeddingMagic[4] = {'E', 'M', 'B', '1'};
inline constexpr std::uint32_t kEmbeddingVersion = 1;
inline constexpr std::size_t kEmbeddingHeaderBytes = 4 + 4 + 1 + 8 + 4;

// Binary view file: "EMB1", u32 version, u8 normalized, u64 rows, u32 dims,
// then rows*dims float32 row-major. Everything little-endian, no padding.
std::string encode_view(const EmbeddingView& view);
EmbeddingView decode_view(std::string_view bytes, std::string name);

struct ViewHeader {
  bool normalized = false;
  std::uint64_t rows = 0;
  std::uint32_t dims = 0;
};

// Reads and checks only the header (and the payload length).
ViewHeader read_view_header(const std::filesystem::path& path);

// `name` defaults to the file stem.
EmbeddingView load_view(const std::filesystem::path& path, std::string name = {});
void save_view(const EmbeddingView& view, const std::filesystem::path& path);

// Newline-delimited JSON objects with id, duration_s and dataset.
// `where` (usually the file path) prefixes error messages.
std::vector<UtteranceRecord> parse_manifest(std::string_view text,
                                            const std::string& where = {});
std::vector<UtteranceRecord> load_manifest(const std::filesystem::path& path);
std::string encode_manifest(const std::vector<UtteranceRecord>& records);
void save_manifest(const std::vector<UtteranceRecord>& records,
                   const std::filesystem::path& path);

// True when every nonzero row has L2 norm within 1e-4 of 1.
bool rows_are_unit(const Matrix& rows);

// Scales each nonzero row to unit L2 norm. Rows whose norm is already exactly
// 1.0 are left bit-for-bit unchanged; zero rows stay zero and are counted.
EmbeddingView l2_normalize(EmbeddingView view, std::size_t* zero_rows = nullptr);

struct LoadOptions {
  bool normalize = true;
  // Views to load; empty means every *.emb in the directory.
  std::vector<std::string> views;
};

// Corpus directory: manifest.jsonl plus one <view>.emb per view.
CorpusManifest load_corpus(const std::filesystem::path& dir,
                           const LoadOptions& options = {});
void save_corpus(const CorpusManifest& corpus, const std::filesystem::path& dir);

// Targets directory: one subdirectory per dataset (processed in name order),
// each holding <view>.emb files and an optional manifest.jsonl. An optional
// top-level targets.json records {"compacted": true} after compaction.
TargetSet load_targets(const std::filesystem::path& dir,
                       const LoadOptions& options = {});
void save_targets(const TargetSet& targets, const std::filesystem::path& dir);

inline constexpr char kManifestFile[] = "manifest.jsonl";
inline constexpr char kTargetsMetaFile[] = "targets.json";
inline constexpr char kViewExtension[] = ".emb";

}  // namespace mmrsel

#endif  // MMRSEL_CORPUS_STORE_HPP_
