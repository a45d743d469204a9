#pragma once

#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace bprec {

// Number of worker threads to use: a positive request wins, otherwise
// the BPREC_THREADS environment variable, otherwise the hardware count.
unsigned resolve_threads(unsigned requested);

// Runs fn(i) for i in [0, count) on `threads` workers with a static
// block partition, so results written to slot i never depend on the
// degree of concurrency.  The first worker exception is rethrown.
template <typename Fn>
void parallel_for_indexed(std::uint64_t count, unsigned threads, Fn&& fn) {
  threads = resolve_threads(threads);
  if (threads <= 1 || count < 2) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  if (threads > count) threads = static_cast<unsigned>(count);

  std::mutex error_mutex;
  std::exception_ptr error;
  auto run_block = [&](std::uint64_t begin, std::uint64_t end) {
    try {
      for (std::uint64_t i = begin; i < end; ++i) fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };

  std::vector<std::thread> workers;
  workers.reserve(threads - 1);
  for (unsigned t = 0; t < threads; ++t) {
    const std::uint64_t begin = count * t / threads;
    const std::uint64_t end = count * (t + 1) / threads;
    if (t + 1 == threads) {
      run_block(begin, end);
    } else {
      workers.emplace_back(run_block, begin, end);
    }
  }
  for (auto& worker : workers) worker.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace bprec
