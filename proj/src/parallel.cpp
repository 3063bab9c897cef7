#include "incdet/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace incdet {

namespace {
int g_threads = 1;
}

void set_threads(int n) {
    g_threads = n < 1 ? 1 : n;
#ifdef _OPENMP
    omp_set_num_threads(g_threads);
#endif
}

int threads() { return g_threads; }

}  // namespace incdet
