#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "dfl/oracle.hpp"

namespace dfl {

// Fixed set of worker threads, each owning its own oracle replica.
// parallel_for hands out indices dynamically and blocks until all are done;
// callers write results into preallocated slots, so output never depends on
// which worker handled which index. The first exception thrown by a task is
// rethrown on the calling thread after the join.
class WorkerPool {
 public:
  using Task = std::function<void(Oracle&, std::size_t)>;

  WorkerPool(const Oracle& prototype, std::size_t workers) {
    if (workers == 0) workers = 1;
    for (std::size_t w = 0; w < workers; ++w) replicas_.push_back(prototype.clone());
    for (std::size_t w = 1; w < workers; ++w) threads_.emplace_back([this, w] { loop(w); });
  }

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  ~WorkerPool() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
    }
    wake_.notify_all();
    for (auto& t : threads_) t.join();
  }

  std::size_t size() const { return replicas_.size(); }
  Oracle& replica(std::size_t w) { return *replicas_[w]; }

  void parallel_for(std::size_t n, const Task& task) {
    if (n == 0) return;
    if (threads_.empty()) {
      for (std::size_t i = 0; i < n; ++i) task(*replicas_[0], i);
      return;
    }
    {
      std::lock_guard lock(mu_);
      task_ = &task;
      total_ = n;
      next_ = 0;
      active_ = threads_.size();
      error_ = nullptr;
      ++generation_;
    }
    wake_.notify_all();
    drain(0);
    std::unique_lock lock(mu_);
    done_.wait(lock, [this] { return active_ == 0; });
    task_ = nullptr;
    if (error_) std::rethrow_exception(error_);
  }

 private:
  void loop(std::size_t w) {
    std::size_t seen = 0;
    while (true) {
      {
        std::unique_lock lock(mu_);
        wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
      }
      drain(w);
      std::lock_guard lock(mu_);
      if (--active_ == 0) done_.notify_all();
    }
  }

  void drain(std::size_t w) {
    while (true) {
      std::size_t i;
      {
        std::lock_guard lock(mu_);
        if (next_ >= total_ || error_) return;
        i = next_++;
      }
      try {
        (*task_)(*replicas_[w], i);
      } catch (...) {
        std::lock_guard lock(mu_);
        if (!error_) error_ = std::current_exception();
      }
    }
  }

  std::vector<std::unique_ptr<Oracle>> replicas_;
  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const Task* task_ = nullptr;
  std::size_t total_ = 0;
  std::size_t next_ = 0;
  std::size_t active_ = 0;
  std::size_t generation_ = 0;
  std::exception_ptr error_;
  bool stop_ = false;
};

}  // namespace dfl
