// SPDX-License-Identifier: Apache-2.0

#include "triage/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace triage {

void set_thread_count(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace triage
