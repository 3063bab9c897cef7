#ifndef INCDET_PARALLEL_HPP
#define INCDET_PARALLEL_HPP

namespace incdet {

// Process-wide worker count for the OpenMP kernels. 1 selects the serial
// reference implementations. Reductions accumulate per-thread partials that
// are combined in thread order, so results are reproducible for a fixed
// thread count.
void set_threads(int n);
int threads();

}  // namespace incdet

#endif  // INCDET_PARALLEL_HPP
