#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace paleylab {

// PALEY_LAB_WORKERS if set and positive, else the hardware thread count.
std::size_t default_workers();

// splitmix64 step; used to derive per-item seeds from a master seed
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

// Runs fn(i) for i in [0, n) on up to `workers` threads. Results are stored
// by index, so the output does not depend on the worker count. The first
// exception (lowest index) is rethrown after all workers stop.
template <class R>
std::vector<R> parallel_map(std::size_t n, std::size_t workers, const std::function<R(std::size_t)>& fn) {
  std::vector<R> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace paleylab
