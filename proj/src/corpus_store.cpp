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

#include "mmrsel/corpus_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "mmrsel/errors.hpp"
#include "mmrsel/io.hpp"

namespace fs = std::filesystem;

namespace mmrsel {
namespace {

static_assert(sizeof(float) == 4);

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

using Header = ViewHeader;

Header parse_header(const unsigned char* p, std::size_t available,
                    const std::string& where) {
  if (available < kEmbeddingHeaderBytes ||
      std::memcmp(p, kEmbeddingMagic, 4) != 0) {
    throw BadMagic(where + ": not an EMB1 embedding file");
  }
  auto version = static_cast<std::uint32_t>(get_le(p + 4, 4));
  if (version != kEmbeddingVersion) {
    throw BadMagic(where + ": unsupported format version " + std::to_string(version));
  }
  Header h;
  h.normalized = p[8] != 0;
  h.rows = get_le(p + 9, 8);
  h.dims = static_cast<std::uint32_t>(get_le(p + 17, 4));
  return h;
}

void check_payload(const Header& h, std::uint64_t payload_bytes,
                   const std::string& where) {
  // Guard the multiplication against overflow before comparing.
  const std::uint64_t max_rows =
      h.dims == 0 ? UINT64_MAX : UINT64_MAX / (4ull * h.dims);
  if (h.rows > max_rows || h.rows * h.dims * 4ull != payload_bytes) {
    throw DimensionMismatch(where + ": header declares " + std::to_string(h.rows) +
                            " x " + std::to_string(h.dims) + " floats but payload has " +
                            std::to_string(payload_bytes) + " bytes");
  }
}

void decode_floats(const unsigned char* src, std::size_t count, float* dst) {
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(dst, src, count * 4);
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      dst[i] = std::bit_cast<float>(static_cast<std::uint32_t>(get_le(src + 4 * i, 4)));
    }
  }
}

std::string view_name_from(const fs::path& path, std::string name) {
  return name.empty() ? path.stem().string() : name;
}

std::vector<std::string> list_views(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == kViewExtension) {
      names.push_back(entry.path().stem().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

void EmbeddingView::validate() const {
  const std::size_t d = rows.cols();
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    auto r = rows.row(i);
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(r[j])) throw NonFiniteEntry(i, j);
      sq += static_cast<double>(r[j]) * r[j];
    }
    if (normalized && sq > 0.0 && std::abs(std::sqrt(sq) - 1.0) > 1e-4) {
      throw NotNormalized("view \"" + name + "\" is flagged normalized but row " +
                          std::to_string(i) + " has norm " +
                          std::to_string(std::sqrt(sq)));
    }
  }
}

std::vector<double> CorpusManifest::durations() const {
  std::vector<double> d;
  d.reserve(records.size());
  for (const auto& r : records) d.push_back(r.duration_s);
  return d;
}

double CorpusManifest::total_duration() const {
  double total = 0.0;
  for (const auto& r : records) total += r.duration_s;
  return total;
}

const EmbeddingView& CorpusManifest::view(const std::string& name) const {
  auto it = views.find(name);
  if (it == views.end()) throw MissingView(name);
  return it->second;
}

void CorpusManifest::validate() const {
  if (views.empty()) throw Error("corpus has no embedding views");
  for (const auto& [name, v] : views) {
    if (v.size() != records.size()) {
      throw DimensionMismatch("view \"" + name + "\" has " + std::to_string(v.size()) +
                              " rows but the manifest has " +
                              std::to_string(records.size()) + " records");
    }
  }
}

void TargetSet::validate(const std::vector<std::string>& view_names) const {
  if (datasets.empty()) throw EmptyTargetSet("target set has no datasets");
  for (const auto& ds : datasets) {
    for (const auto& name : view_names) {
      auto it = ds.views.find(name);
      if (it == ds.views.end()) {
        throw MissingView(name + "\" in target dataset \"" + ds.name);
      }
      if (it->second.empty()) {
        throw EmptyTargets("target dataset \"" + ds.name + "\" has no rows for view \"" +
                           name + "\"");
      }
    }
  }
}

std::vector<double> TargetSet::all_durations() const {
  std::vector<double> out;
  for (const auto& ds : datasets) {
    for (const auto& r : ds.records) out.push_back(r.duration_s);
  }
  return out;
}

std::string encode_view(const EmbeddingView& view) {
  std::string out;
  const std::size_t values = view.rows.values().size();
  out.reserve(kEmbeddingHeaderBytes + 4 * values);
  out.append(kEmbeddingMagic, 4);
  put_u32(out, kEmbeddingVersion);
  out.push_back(view.normalized ? 1 : 0);
  put_u64(out, view.rows.rows());
  put_u32(out, static_cast<std::uint32_t>(view.rows.cols()));
  for (float f : view.rows.values()) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

EmbeddingView decode_view(std::string_view bytes, std::string name) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::string where = name.empty() ? std::string("<memory>") : name;
  Header h = parse_header(p, bytes.size(), where);
  check_payload(h, bytes.size() - kEmbeddingHeaderBytes, where);
  std::vector<float> data(h.rows * h.dims);
  decode_floats(p + kEmbeddingHeaderBytes, data.size(), data.data());
  EmbeddingView view{std::move(name), Matrix(h.rows, h.dims, std::move(data)),
                     h.normalized};
  view.validate();
  return view;
}

ViewHeader read_view_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  unsigned char header[kEmbeddingHeaderBytes] = {};
  in.read(reinterpret_cast<char*>(header), kEmbeddingHeaderBytes);
  Header h = parse_header(header, static_cast<std::size_t>(in.gcount()), path.string());
  check_payload(h, fs::file_size(path) - kEmbeddingHeaderBytes, path.string());
  return h;
}

EmbeddingView load_view(const fs::path& path, std::string name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::uint64_t file_bytes = fs::file_size(path);
  unsigned char header[kEmbeddingHeaderBytes] = {};
  in.read(reinterpret_cast<char*>(header), kEmbeddingHeaderBytes);
  Header h = parse_header(header, static_cast<std::size_t>(in.gcount()), path.string());
  check_payload(h, file_bytes - kEmbeddingHeaderBytes, path.string());

  std::vector<float> data(h.rows * h.dims);
  if constexpr (std::endian::native == std::endian::little) {
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size() * 4));
  } else {
    std::vector<unsigned char> raw(data.size() * 4);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    decode_floats(raw.data(), data.size(), data.data());
  }
  if (!in) throw IoError("short read on " + path.string());

  EmbeddingView view{view_name_from(path, std::move(name)),
                     Matrix(h.rows, h.dims, std::move(data)), h.normalized};
  try {
    view.validate();
  } catch (const NonFiniteEntry& e) {
    throw NonFiniteEntry(e.row(), e.col(), path.string());
  } catch (const NotNormalized& e) {
    throw NotNormalized(path.string() + ": " + e.what());
  }
  return view;
}

void save_view(const EmbeddingView& view, const fs::path& path) {
  write_file_atomic(path, encode_view(view));
}

std::vector<UtteranceRecord> parse_manifest(std::string_view text,
                                            const std::string& where) {
  const std::string prefix = where.empty() ? std::string() : where + ": ";
  std::vector<UtteranceRecord> records;
  std::unordered_map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw MalformedLine(prefix + "not a JSON object", line_no);
    }
    if (!obj.is_object()) throw MalformedLine(prefix + "not a JSON object", line_no);
    auto id = obj.find("id");
    auto dur = obj.find("duration_s");
    auto ds = obj.find("dataset");
    if (id == obj.end() || !id->is_string()) {
      throw MalformedLine(prefix + "missing string field \"id\"", line_no);
    }
    if (dur == obj.end() || !dur->is_number()) {
      throw MalformedLine(prefix + "missing numeric field \"duration_s\"", line_no);
    }
    if (ds == obj.end() || !ds->is_string()) {
      throw MalformedLine(prefix + "missing string field \"dataset\"", line_no);
    }
    UtteranceRecord rec{id->get<std::string>(), dur->get<double>(), ds->get<std::string>()};
    if (!(rec.duration_s > 0.0) || !std::isfinite(rec.duration_s)) {
      throw NonPositiveDuration(prefix + "duration_s must be positive for \"" + rec.id + "\"",
                                line_no);
    }
    if (!seen.emplace(rec.id, line_no).second) throw DuplicateId(rec.id, line_no, where);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<UtteranceRecord> load_manifest(const fs::path& path) {
  return parse_manifest(read_file(path), path.string());
}

std::string encode_manifest(const std::vector<UtteranceRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json obj;
    obj["id"] = r.id;
    obj["duration_s"] = r.duration_s;
    obj["dataset"] = r.dataset;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void save_manifest(const std::vector<UtteranceRecord>& records, const fs::path& path) {
  write_file_atomic(path, encode_manifest(records));
}

bool rows_are_unit(const Matrix& rows) {
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    double sq = 0.0;
    for (float x : rows.row(i)) sq += static_cast<double>(x) * x;
    if (sq > 0.0 && std::abs(std::sqrt(sq) - 1.0) > 1e-4) return false;
  }
  return true;
}

EmbeddingView l2_normalize(EmbeddingView view, std::size_t* zero_rows) {
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < view.rows.rows(); ++i) {
    auto r = view.rows.row(i);
    double sq = 0.0;
    for (float x : r) sq += static_cast<double>(x) * x;
    if (sq == 0.0) {
      ++zeros;
      continue;
    }
    const double norm = std::sqrt(sq);
    if (norm == 1.0) continue;
    const double inv = 1.0 / norm;
    for (float& x : r) x = static_cast<float>(x * inv);
  }
  view.normalized = true;
  if (zero_rows) *zero_rows = zeros;
  return view;
}

CorpusManifest load_corpus(const fs::path& dir, const LoadOptions& options) {
  const fs::path manifest_path = dir / kManifestFile;
  if (!fs::exists(manifest_path)) throw IoError("missing " + manifest_path.string());
  CorpusManifest corpus;
  corpus.records = load_manifest(manifest_path);
  auto names = options.views.empty() ? list_views(dir) : options.views;
  for (const auto& name : names) {
    const fs::path p = dir / (name + kViewExtension);
    if (!fs::exists(p)) throw MissingView(name + "\" (no file " + p.string() + ")");
    EmbeddingView v = load_view(p, name);
    if (options.normalize && !v.normalized) v = l2_normalize(std::move(v));
    corpus.views.emplace(name, std::move(v));
  }
  corpus.validate();
  return corpus;
}

void save_corpus(const CorpusManifest& corpus, const fs::path& dir) {
  fs::create_directories(dir);
  save_manifest(corpus.records, dir / kManifestFile);
  for (const auto& [name, view] : corpus.views) {
    save_view(view, dir / (name + kViewExtension));
  }
}

TargetSet load_targets(const fs::path& dir, const LoadOptions& options) {
  if (!fs::is_directory(dir)) throw IoError("targets directory not found: " + dir.string());
  TargetSet targets;
  const fs::path meta = dir / kTargetsMetaFile;
  if (fs::exists(meta)) {
    auto j = nlohmann::json::parse(read_file(meta), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw IoError("malformed " + meta.string());
    targets.compacted = j.value("compacted", false);
  }
  std::vector<fs::path> subdirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) subdirs.push_back(entry.path());
  }
  std::sort(subdirs.begin(), subdirs.end());
  for (const auto& sub : subdirs) {
    TargetDataset ds;
    ds.name = sub.filename().string();
    auto names = options.views.empty() ? list_views(sub) : options.views;
    for (const auto& name : names) {
      const fs::path p = sub / (name + kViewExtension);
      if (!fs::exists(p)) throw MissingView(name + "\" in target dataset \"" + ds.name);
      EmbeddingView v = load_view(p, name);
      if (options.normalize && !v.normalized) v = l2_normalize(std::move(v));
      ds.views.emplace(name, std::move(v.rows));
    }
    if (fs::exists(sub / kManifestFile)) ds.records = load_manifest(sub / kManifestFile);
    targets.datasets.push_back(std::move(ds));
  }
  if (targets.datasets.empty()) {
    throw EmptyTargetSet("no dataset subdirectories in " + dir.string());
  }
  return targets;
}

void save_targets(const TargetSet& targets, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& ds : targets.datasets) {
    const fs::path sub = dir / ds.name;
    fs::create_directories(sub);
    for (const auto& [name, rows] : ds.views) {
      save_view(EmbeddingView{name, rows, rows_are_unit(rows)},
                sub / (name + kViewExtension));
    }
    if (!ds.records.empty()) save_manifest(ds.records, sub / kManifestFile);
  }
  nlohmann::json meta = {{"compacted", targets.compacted}};
  write_file_atomic(dir / kTargetsMetaFile, meta.dump() + "\n");
}

}  // namespace mmrsel
