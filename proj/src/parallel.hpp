#pragma once

#include <exception>
#include <vector>

#include "ccesnet/types.hpp"

namespace ccesnet::detail {

// Runs body(i) for i in [0, n). Exceptions cannot cross an OpenMP region, so
// they are captured per index and the lowest-index one is rethrown.
template <typename Body>
void for_each_index(int n, Exec exec, Body&& body) {
  if (exec == Exec::serial) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace ccesnet::detail
