#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace volseg {

// Static block partition of [begin, end) over worker threads. Bodies must be
// independent; callers keep determinism by writing to index-addressed slots
// and reducing in index order afterwards. num_threads <= 0 uses all cores.
inline void parallel_for(long begin, long end, int num_threads,
                         const std::function<void(long)>& body) {
  long count = end - begin;
  if (count <= 0) return;
  long workers = num_threads > 0
                     ? num_threads
                     : static_cast<long>(std::thread::hardware_concurrency());
  workers = std::clamp<long>(workers, 1, count);
  if (workers == 1) {
    for (long i = begin; i < end; ++i) body(i);
    return;
  }
  std::mutex error_mutex;
  std::exception_ptr error;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  long chunk = (count + workers - 1) / workers;
  for (long w = 0; w < workers; ++w) {
    long lo = begin + w * chunk;
    long hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (long i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace volseg
