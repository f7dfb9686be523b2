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

#ifndef MMRSEL_PARALLEL_HPP_
#define MMRSEL_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace mmrsel {

// Worker cap for all data-parallel loops. 0 restores the default, which is
// MMRSEL_THREADS from the environment if set, else hardware concurrency.
void set_num_threads(int n);
int num_threads();

// Splits [0, n) into fixed chunks of `grain` items and runs
// fn(chunk_index, begin, end) for each chunk on the worker pool. Chunk
// boundaries depend only on n and grain, never on the worker count, so any
// per-chunk partial result merged in chunk order is deterministic.
// The first exception thrown by a worker is rethrown on the caller.
void parallel_for_chunks(
    std::size_t n, std::size_t grain,
    const std::function<void(std::size_t chunk, std::size_t begin, std::size_t end)>& fn);

inline std::size_t chunk_count(std::size_t n, std::size_t grain) {
  return grain == 0 ? 0 : (n + grain - 1) / grain;
}

}  // namespace mmrsel

#endif  // MMRSEL_PARALLEL_HPP_
