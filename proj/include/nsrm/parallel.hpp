#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nsrm {

inline int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs body(i) for i in [0, n) on up to `jobs` threads (jobs <= 0 means one
/// per hardware thread). Work is claimed dynamically; callers must make body
/// independent per index. The first exception thrown is rethrown.
template <class Body>
void parallel_for(std::size_t n, int jobs, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(resolve_jobs(jobs)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline constexpr std::size_t kReductionBlock = 4096;

/// Sum of term(i) for i in [0, n). Terms are summed sequentially inside
/// fixed-size blocks, and block sums are combined by a pairwise tree, so the
/// result does not depend on `jobs`.
template <class Term>
double deterministic_sum(std::size_t n, int jobs, Term&& term) {
  if (n == 0) return 0.0;
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);
  parallel_for(blocks, jobs, [&](std::size_t b) {
    const std::size_t lo = b * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[b] = s;
  });
  for (std::size_t width = 1; width < blocks; width *= 2)
    for (std::size_t i = 0; i + width < blocks; i += 2 * width) partial[i] += partial[i + width];
  return partial[0];
}

}  // namespace nsrm
