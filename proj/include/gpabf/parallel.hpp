// Copyright 2026 The gpabf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace gpabf {

namespace detail {

inline std::atomic<int>& thread_limit_storage() {
  static std::atomic<int> limit = [] {
    if (const char* env = std::getenv("GPABF_NUM_THREADS")) {
      const int n = std::atoi(env);
      if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }();
  return limit;
}

}  // namespace detail

/// Upper bound on worker threads used for row-parallel loops.
/// Initialized from GPABF_NUM_THREADS, else the hardware concurrency.
inline int thread_limit() { return detail::thread_limit_storage().load(); }

inline void set_thread_limit(int n) {
  detail::thread_limit_storage().store(std::max(1, n));
}

namespace detail {

// Splits [0, rows) into contiguous chunks and runs fn(chunk, begin, end) for
// each, one chunk per thread. Every row belongs to exactly one chunk, so the
// output never depends on the thread count as long as fn only writes data
// owned by its rows. `chunk` is below max_chunks().
template <typename Fn>
void parallel_chunks(int rows, std::size_t work_per_row, Fn&& fn) {
  constexpr std::size_t kMinWorkPerThread = 1 << 15;
  const std::size_t total = static_cast<std::size_t>(rows) * work_per_row;
  int threads = std::min(thread_limit(), rows);
  threads = std::min<int>(threads,
                          static_cast<int>(total / kMinWorkPerThread) + 1);
  if (threads <= 1) {
    fn(0, 0, rows);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    const int begin = rows * t / threads;
    const int end = rows * (t + 1) / threads;
    pool.emplace_back([t, begin, end, &fn] { fn(t, begin, end); });
  }
}

template <typename Fn>
void parallel_rows(int rows, std::size_t work_per_row, Fn&& fn) {
  parallel_chunks(rows, work_per_row, [&fn](int, int begin, int end) {
    for (int r = begin; r < end; ++r) fn(r);
  });
}

}  // namespace detail
}  // namespace gpabf
