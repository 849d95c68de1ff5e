#pragma once

#include <cstdint>
#include <exception>

#include "gltlab/exec.hpp"

namespace gltlab {

/// Runs body(i) for i in [0, count). On failure the exception of the smallest
/// failing index is rethrown, so both paths report the same error.
template <class Body>
void for_each_index(std::int64_t count, Exec exec, Body&& body) {
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::int64_t first_failure = count;
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(gltlab_kernel_failure)
      {
        if (i < first_failure) {
          first_failure = i;
          failure = std::current_exception();
        }
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace gltlab
