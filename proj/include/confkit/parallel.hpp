//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CONFKIT_PARALLEL_HPP_
#define CONFKIT_PARALLEL_HPP_

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace confkit {

/// kSerial is the reference path; kParallel must produce identical results.
enum class ExecPolicy {
  kSerial,
  kParallel,
};

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Calls fn(i) for i in [0, n). Each index must write only its own output
/// slot. An exception thrown by any index is rethrown after the loop; when
/// several indices throw, the lowest index wins so failures are reproducible.
template <class Fn>
void for_each_index(ExecPolicy policy, std::size_t n, Fn &&fn) {
  if (policy == ExecPolicy::kSerial || n < 2) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }

  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto &e: errors) {
    if (e)
      std::rethrow_exception(e);
  }
}

}  // namespace confkit

#endif  // CONFKIT_PARALLEL_HPP_
