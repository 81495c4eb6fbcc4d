#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace invgauss {

// Thread count: INVGAUSS_THREADS if set, else the requested value, else the hardware count.
inline unsigned resolve_threads(unsigned requested = 0) {
  if (const char* env = std::getenv("INVGAUSS_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return unsigned(v);
    } catch (const std::exception&) {
    }
  }
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// out[i] = f(i) for i < count.  Workers pull indices from a shared counter;
// results land in their own slot, so the output does not depend on scheduling.
// The first exception (by index) is rethrown after all workers finish.
template <class R, class F>
std::vector<R> parallel_map(std::size_t count, F&& f, unsigned threads = 0) {
  std::vector<R> out(count);
  const unsigned t = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(count, 1));
  if (t <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::mutex m;
  std::size_t err_index = count;
  std::exception_ptr err;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(m);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < t; ++k) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace invgauss
