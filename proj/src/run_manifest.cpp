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

#include "mmrsel/run_manifest.hpp"

#include "mmrsel/errors.hpp"
#include "mmrsel/io.hpp"

namespace fs = std::filesystem;

namespace mmrsel {

nlohmann::ordered_json to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool_version"] = m.tool_version;
  j["command"] = m.command;
  j["config"] = m.config;
  j["input_digests"] = m.input_digests;
  j["seeds"] = m.seeds;
  j["phase_seconds"] = m.phase_seconds;
  j["output_path"] = m.output_path;
  j["output_digest"] = m.output_digest;
  return j;
}

RunManifest run_manifest_from_json(const nlohmann::json& j) {
  try {
    RunManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.config = nlohmann::ordered_json(j.at("config"));
    m.input_digests = j.at("input_digests").get<std::map<std::string, std::string>>();
    m.seeds = j.at("seeds").get<std::map<std::string, std::uint64_t>>();
    m.phase_seconds = j.value("phase_seconds", std::map<std::string, double>{});
    m.output_path = j.at("output_path").get<std::string>();
    m.output_digest = j.value("output_digest", std::string{});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed run manifest: ") + e.what());
  }
}

fs::path sidecar_path(const fs::path& output) {
  fs::path p = output;
  p += ".manifest.json";
  return p;
}

fs::path emit_run_manifest(const RunManifest& manifest) {
  const fs::path path = sidecar_path(manifest.output_path);
  write_file_atomic(path, to_json(manifest).dump(2) + "\n");
  return path;
}

RunManifest load_run_manifest(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("run manifest not found: " + path.string());
  auto j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error("malformed run manifest: " + path.string());
  return run_manifest_from_json(j);
}

}  // namespace mmrsel
