#pragma once

// Data-parallel loops over index ranges and 2-D grids. Every kernel has a
// serial path (the reference the tests compare against) and an OpenMP path.
// Reductions are max / min over exact values, so both paths agree bit for bit.
// Exceptions thrown by the body are captured and rethrown after the region.

#include <algorithm>
#include <exception>
#include <limits>
#include <mutex>

namespace fairdyn::kernels {

enum class Exec { Serial, Parallel };

namespace detail {

class ErrorSlot {
 public:
  void capture() {
    std::lock_guard<std::mutex> lock(mu_);
    if (!err_) err_ = std::current_exception();
  }
  void rethrow() const {
    if (err_) std::rethrow_exception(err_);
  }

 private:
  std::mutex mu_;
  std::exception_ptr err_;
};

}  // namespace detail

// body(i) for i in [0, count).
template <class Body>
void for_each_index(Exec exec, long count, Body&& body) {
  if (exec == Exec::Serial) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  detail::ErrorSlot errors;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      errors.capture();
    }
  }
  errors.rethrow();
}

// max over i in [0, count) of value(i); -inf when empty.
template <class Value>
double max_over_range(Exec exec, long count, Value&& value) {
  double best = -std::numeric_limits<double>::infinity();
  if (exec == Exec::Serial) {
    for (long i = 0; i < count; ++i) best = std::max(best, value(i));
    return best;
  }
  detail::ErrorSlot errors;
#pragma omp parallel for schedule(static) reduction(max : best)
  for (long i = 0; i < count; ++i) {
    try {
      best = std::max(best, value(i));
    } catch (...) {
      errors.capture();
    }
  }
  errors.rethrow();
  return best;
}

// Smallest i in [0, count) with pred(i), or -1.
template <class Pred>
long first_index_where(Exec exec, long count, Pred&& pred) {
  if (exec == Exec::Serial) {
    for (long i = 0; i < count; ++i)
      if (pred(i)) return i;
    return -1;
  }
  long first = count;
  detail::ErrorSlot errors;
#pragma omp parallel for schedule(static) reduction(min : first)
  for (long i = 0; i < count; ++i) {
    try {
      if (i < first && pred(i)) first = std::min(first, i);
    } catch (...) {
      errors.capture();
    }
  }
  errors.rethrow();
  return first == count ? -1 : first;
}

// Number of OpenMP threads the parallel path will use.
int parallel_width();

}  // namespace fairdyn::kernels
