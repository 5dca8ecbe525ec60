#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "mkews/series.hpp"

namespace mkews {

/// Runs body(i) for i in [0, count) on `workers` threads. Indices are handed
/// out dynamically, so body must write only to its own slot. If several calls
/// throw, the exception from the lowest index is rethrown.
template <typename Body>
void parallel_for(Index count, int workers, Body&& body) {
  const Index threads = std::clamp<Index>(workers, 1, std::max<Index>(count, 1));
  std::atomic<Index> next{0};
  std::mutex failure_mutex;
  Index failed_index = count;
  std::exception_ptr failure;

  auto run = [&] {
    for (Index i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };

  if (threads == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (Index t = 0; t < threads; ++t) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace mkews
