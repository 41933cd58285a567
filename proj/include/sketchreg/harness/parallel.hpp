#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sketchreg {

/// 0 means one worker per hardware thread.
unsigned resolve_workers(unsigned requested) noexcept;

/// Evaluates fn(i) for i in [0, count) on up to `workers` threads. Result i lands in slot i,
/// so any reduction over the returned vector is independent of scheduling. The first
/// exception thrown by fn (lowest index) is rethrown after all workers stop.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, unsigned workers, Fn&& fn) {
  std::vector<T> out(count);
  const unsigned w = std::min<std::size_t>(resolve_workers(workers), count == 0 ? 1 : count);
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr err;
  std::size_t err_index = count;
  auto body = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  if (w <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (unsigned t = 0; t < w; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace sketchreg
