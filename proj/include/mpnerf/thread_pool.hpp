// Copyright (c) 2026 multiplane-nerf-cpp contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace mpnerf {

// Work is always split into a FIXED number of shards chosen by the caller,
// never by the pool size; each shard runs sequentially inside one worker.
// Results therefore do not depend on how many threads execute the shards.
class ThreadPool {
 public:
  explicit ThreadPool(int n_threads) {
    n_threads = n_threads < 1 ? 1 : n_threads;
    for (int i = 0; i < n_threads - 1; ++i) {
      workers_.emplace_back([this] { worker_loop(); });
    }
  }

  ~ThreadPool() {
    {
      std::unique_lock<std::mutex> lock(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : workers_) t.join();
  }

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int size() const { return static_cast<int>(workers_.size()) + 1; }

  // Runs fn(shard) for shard in [0, n_shards); blocks until all are done.
  // The calling thread participates.
  void parallel_shards(int n_shards, const std::function<void(int)>& fn) {
    if (n_shards <= 0) return;
    if (workers_.empty() || n_shards == 1) {
      for (int s = 0; s < n_shards; ++s) fn(s);
      return;
    }
    {
      std::unique_lock<std::mutex> lock(mu_);
      job_fn_ = &fn;
      job_total_ = n_shards;
      job_next_.store(0, std::memory_order_relaxed);
      job_done_.store(0, std::memory_order_relaxed);
      generation_++;
    }
    cv_.notify_all();
    run_shards(fn, n_shards);
    std::unique_lock<std::mutex> lock(mu_);
    done_cv_.wait(lock, [&] { return job_done_.load(std::memory_order_acquire) == job_total_; });
    job_fn_ = nullptr;
  }

  static int hardware_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
  }

 private:
  void run_shards(const std::function<void(int)>& fn, int total) {
    for (;;) {
      int s = job_next_.fetch_add(1, std::memory_order_relaxed);
      if (s >= total) break;
      fn(s);
      if (job_done_.fetch_add(1, std::memory_order_acq_rel) + 1 == total) {
        std::unique_lock<std::mutex> lock(mu_);
        done_cv_.notify_all();
      }
    }
  }

  void worker_loop() {
    uint64_t seen = 0;
    for (;;) {
      const std::function<void(int)>* fn = nullptr;
      int total = 0;
      {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [&] { return stop_ || (job_fn_ != nullptr && generation_ != seen); });
        if (stop_) return;
        seen = generation_;
        fn = job_fn_;
        total = job_total_;
      }
      run_shards(*fn, total);
    }
  }

  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  bool stop_ = false;
  const std::function<void(int)>* job_fn_ = nullptr;
  int job_total_ = 0;
  uint64_t generation_ = 0;
  std::atomic<int> job_next_{0};
  std::atomic<int> job_done_{0};
};

}  // namespace mpnerf
