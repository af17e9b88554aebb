#pragma once

#include <cstddef>
#include <exception>
#include <type_traits>
#include <vector>

#include <omp.h>

namespace magstep {

// Thread count used by sweeps when none is given. Initialized from
// MAGSTEP_THREADS, falling back to the OpenMP default.
int default_threads();
void set_default_threads(int n);

// Reference implementation: f(0), ..., f(n-1) in order.
template <class F>
auto serial_map(std::size_t n, F&& f) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  std::vector<std::invoke_result_t<F&, std::size_t>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(f(i));
  return out;
}

// Same result as serial_map, cells evaluated on an OpenMP pool with dynamic
// scheduling. The first exception (lowest index) is rethrown after the loop.
template <class F>
auto parallel_map(std::size_t n, F&& f, int threads = 0) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using R = std::invoke_result_t<F&, std::size_t>;
  if (threads <= 0) threads = default_threads();
  if (threads == 1 || n < 2) return serial_map(n, f);
  std::vector<R> out(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    try {
      out[i] = f(static_cast<std::size_t>(i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace magstep
