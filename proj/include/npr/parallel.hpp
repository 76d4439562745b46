#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace npr {

// Worker count used by every parallel stage. 0 selects hardware concurrency.
void set_thread_count(unsigned count);
unsigned thread_count();

class ScopedThreadCount {
 public:
  explicit ScopedThreadCount(unsigned count) : saved_(thread_count()) { set_thread_count(count); }
  ~ScopedThreadCount() { set_thread_count(saved_); }
  ScopedThreadCount(const ScopedThreadCount&) = delete;
  ScopedThreadCount& operator=(const ScopedThreadCount&) = delete;

 private:
  unsigned saved_;
};

// Splits [0, count) into contiguous chunks and calls fn(begin, end) for each,
// possibly concurrently. Callers must write only to chunk-disjoint outputs.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t min_chunk, Fn&& fn) {
  if (count == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(thread_count(), (count + std::max<std::size_t>(min_chunk, 1) - 1) /
                                                std::max<std::size_t>(min_chunk, 1));
  if (workers <= 1) {
    fn(std::size_t{0}, count);
    return;
  }
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t b = w * chunk;
      const std::size_t e = std::min(count, b + chunk);
      if (b >= e) break;
      pool.emplace_back([&, w, b, e] {
        try {
          fn(b, e);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace npr
