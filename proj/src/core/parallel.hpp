#ifndef LINEAGELAB_PARALLEL_HPP
#define LINEAGELAB_PARALLEL_HPP

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "rng_field.hpp"

namespace llab {

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Results must be written
/// to per-index slots so that the outcome does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  const auto count = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  for (std::size_t w = 0; w < count; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

/// Seed of replica r derived from the experiment seed.
inline std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t r) {
  return mix64(seed ^ mix64(r + 0x9e3779b97f4a7c15ull));
}

}  // namespace llab

#endif
