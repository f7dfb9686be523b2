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

#ifndef MMRSEL_CLI_HPP_
#define MMRSEL_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace mmrsel {

// Subcommands: project, audit, compact-targets, select, probe, stats.
// Exit codes: 0 success, 1 data or IO error, 2 usage error. `args` excludes
// the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mmrsel

#endif  // MMRSEL_CLI_HPP_
