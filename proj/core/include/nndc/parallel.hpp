#pragma once

#include <cstddef>
#include <functional>

namespace nndc {

/// Number of worker threads used by the library. Reads NNDC_THREADS once;
/// falls back to std::thread::hardware_concurrency().
std::size_t thread_count();

/// Overrides the thread count for the rest of the process (0 restores the
/// environment/hardware default).
void set_thread_count(std::size_t threads);

/// Calls body(i) for every i in [begin, end). Work is split into contiguous
/// blocks; body must only write state owned by index i so results do not
/// depend on scheduling. Exceptions from body are rethrown (first one wins).
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body);

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (x >= 0 ? x : -x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace nndc
