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

#ifndef MMRSEL_RUN_MANIFEST_HPP_
#define MMRSEL_RUN_MANIFEST_HPP_

#include <filesystem>
#include <cstdint>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace mmrsel {

inline constexpr char kToolVersion[] = "0.1.0";

// Sidecar written next to every output. `config` holds every option with its
// defaults filled in, enough to rerun the command; phase_seconds are the only
// fields expected to differ between two identical runs.
struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string command;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::map<std::string, std::string> input_digests;  // path -> sha256
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, double> phase_seconds;
  std::string output_path;
  std::string output_digest;
};

nlohmann::ordered_json to_json(const RunManifest& manifest);
RunManifest run_manifest_from_json(const nlohmann::json& j);

std::filesystem::path sidecar_path(const std::filesystem::path& output);

// Writes the sidecar for manifest.output_path atomically; returns its path.
std::filesystem::path emit_run_manifest(const RunManifest& manifest);
RunManifest load_run_manifest(const std::filesystem::path& path);

}  // namespace mmrsel

#endif  // MMRSEL_RUN_MANIFEST_HPP_
