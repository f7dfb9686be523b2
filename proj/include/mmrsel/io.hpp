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

#ifndef MMRSEL_IO_HPP_
#define MMRSEL_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>

namespace mmrsel {

// Writes `bytes` to a sibling temp file and renames it over `path`, so the
// final path either holds the complete content or is untouched.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

// Lowercase hex SHA-256 of a byte string / of a file's content.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace mmrsel

#endif  // MMRSEL_IO_HPP_
