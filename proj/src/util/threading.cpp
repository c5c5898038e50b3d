// Copyright 2026 The Stampede Authors
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

#include "stampede/util/threading.hpp"

#include <algorithm>
#include <cstdlib>

namespace stampede::util {

ThreadPool& global_pool() {
  static ThreadPool pool([] {
    if (const char* env = std::getenv("STAMPEDE_THREADS")) {
      int n = std::atoi(env);
      if (n >= 1) return n;
    }
    return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  }());
  return pool;
}

void parallel_for(ThreadPool* pool, int count, const std::function<void(int, int)>& body) {
  if (count <= 0) return;
  if (pool == nullptr || pool->size() == 1 || count == 1) {
    body(0, count);
    return;
  }
  // Chunk grid depends only on count, never on pool size.
  constexpr int kTargetChunks = 16;
  const int chunk = std::max(1, (count + kTargetChunks - 1) / kTargetChunks);
  const int num_chunks = (count + chunk - 1) / chunk;
  pool->run_chunks(num_chunks, [&](int c) {
    const int begin = c * chunk;
    const int end = std::min(count, begin + chunk);
    body(begin, end);
  });
}

}  // namespace stampede::util
