#include "gn/sweep.hpp"

#include <atomic>
#include <bit>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace gn {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x51ed2701ull));
}

std::uint64_t point_seed(std::uint64_t master, Real mu, Real g) {
  std::uint64_t h = splitmix64(std::bit_cast<std::uint64_t>(mu));
  h = splitmix64(h ^ std::bit_cast<std::uint64_t>(g));
  return splitmix64(h ^ splitmix64(master));
}

int resolve_workers(int requested) {
  if (requested >= 1) return requested;
  if (const char* env = std::getenv("GN_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw >= 1 ? static_cast<int>(hw) : 1;
}

void parallel_for_each(std::size_t n, const std::function<void(std::size_t)>& fn, int workers) {
  if (n == 0) return;
  const int nw = std::min<std::size_t>(static_cast<std::size_t>(resolve_workers(workers)), n);

  std::vector<std::exception_ptr> errors(n);
  if (nw <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nw));
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

} // namespace gn
