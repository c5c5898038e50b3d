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

#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <queue>
#include <thread>
#include <vector>

namespace stampede::util {

// Fixed-size worker pool. Results must not depend on which worker runs a
// task; parallel_for partitions work into a fixed chunk grid so reductions
// done chunk-by-chunk are deterministic for any pool size.
class ThreadPool {
 public:
  explicit ThreadPool(int num_threads) {
    if (num_threads < 1) num_threads = 1;
    for (int i = 0; i < num_threads; ++i) {
      workers_.emplace_back([this] { worker_loop(); });
    }
  }

  ~ThreadPool() {
    {
      std::unique_lock lock(mutex_);
      done_ = true;
    }
    cv_.notify_all();
    for (auto& w : workers_) w.join();
  }

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int size() const { return static_cast<int>(workers_.size()); }

  // Runs fn(chunk_index) for chunk_index in [0, num_chunks) and waits for
  // completion. Chunks may run in any order on any worker. Shared state is
  // heap-owned so late-waking workers outlive the caller safely.
  void run_chunks(int num_chunks, const std::function<void(int)>& fn) {
    if (num_chunks <= 0) return;
    if (num_chunks == 1 || size() == 1) {
      for (int i = 0; i < num_chunks; ++i) fn(i);
      return;
    }
    struct Shared {
      std::atomic<int> next{0};
      std::atomic<int> remaining;
      std::mutex done_mutex;
      std::condition_variable done_cv;
      const std::function<void(int)>* fn;
      int num_chunks;
    };
    auto shared = std::make_shared<Shared>();
    shared->remaining.store(num_chunks);
    shared->fn = &fn;
    shared->num_chunks = num_chunks;
    auto task = [shared] {
      for (;;) {
        const int i = shared->next.fetch_add(1);
        if (i >= shared->num_chunks) break;
        (*shared->fn)(i);
        if (shared->remaining.fetch_sub(1) == 1) {
          std::lock_guard lock(shared->done_mutex);
          shared->done_cv.notify_one();
        }
      }
    };
    {
      std::unique_lock lock(mutex_);
      for (int i = 0; i < size(); ++i) tasks_.push(task);
    }
    cv_.notify_all();
    task();  // caller participates; fn stays alive until the wait below ends
    std::unique_lock lock(shared->done_mutex);
    shared->done_cv.wait(lock, [&] { return shared->remaining.load() == 0; });
  }

 private:
  void worker_loop() {
    for (;;) {
      std::function<void()> task;
      {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [this] { return done_ || !tasks_.empty(); });
        if (done_ && tasks_.empty()) return;
        task = std::move(tasks_.front());
        tasks_.pop();
      }
      task();
    }
  }

  std::vector<std::thread> workers_;
  std::queue<std::function<void()>> tasks_;
  std::mutex mutex_;
  std::condition_variable cv_;
  bool done_ = false;
};

// Pool shared by physics island solves, env feature extraction, and learner
// gradient chunks. Size from STAMPEDE_THREADS, default hardware concurrency.
ThreadPool& global_pool();

// Splits [0, count) into chunks and runs body(begin, end) per chunk on the
// pool. The chunk grid depends only on count, so any per-chunk outputs can
// be reduced in chunk order deterministically.
void parallel_for(ThreadPool* pool, int count, const std::function<void(int, int)>& body);

}  // namespace stampede::util
