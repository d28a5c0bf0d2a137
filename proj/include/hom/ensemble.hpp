#pragma once

// Trajectory fan-out. Every trajectory i gets RngStream(seed, i) and writes its
// own slot of the output, so both kernels return identical vectors for any
// thread count. The serial kernel is the reference the parallel one is tested
// and benchmarked against.

#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <type_traits>
#include <vector>

#include <omp.h>

#include "hom/rng.hpp"

namespace hom {

/// threads <= 0 means the OpenMP default.
inline int resolve_threads(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

template <class Fn>
auto run_ensemble_serial(std::size_t n, std::uint64_t seed, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, RngStream&>> {
  std::vector<std::invoke_result_t<Fn&, RngStream&>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng(seed, i);
    out.push_back(fn(rng));
  }
  return out;
}

template <class Fn>
auto run_ensemble_parallel(std::size_t n, std::uint64_t seed, Fn&& fn, int threads = 0)
    -> std::vector<std::invoke_result_t<Fn&, RngStream&>> {
  using Result = std::invoke_result_t<Fn&, RngStream&>;
  static_assert(std::is_default_constructible_v<Result>, "ensemble results are written into preallocated slots");
  std::vector<Result> out(n);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto count = static_cast<std::int64_t>(n);

#pragma omp parallel for schedule(dynamic, 64) num_threads(resolve_threads(threads))
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      RngStream rng(seed, static_cast<std::uint64_t>(i));
      out[static_cast<std::size_t>(i)] = fn(rng);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace hom
