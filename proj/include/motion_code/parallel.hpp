#ifndef MOTION_CODE_PARALLEL_HPP
#define MOTION_CODE_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace motion_code {

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to per-index slots; callers reduce them afterwards in index order
/// so sums do not depend on scheduling. The first exception by index is
/// rethrown.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn &&fn) {
  std::vector<std::exception_ptr> errors(n);
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += workers) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto &e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

} // namespace motion_code

#endif
