#pragma once

#include <cstddef>
#include <thread>

#ifdef DENAT_HAVE_OPENMP
#include <omp.h>
#endif

namespace denat::par {

inline int defaultJobs() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

/// Serial reference kernel. The parallel path must be indistinguishable from
/// this one in its outputs; tests compare the two.
template <class F>
void forIndexSerial(size_t n, F&& f) {
    for (size_t i = 0; i < n; ++i) f(i);
}

/// Index-parallel map over [0, n). Work items must be independent; callers
/// write into pre-sized slots so output order never depends on scheduling.
template <class F>
void forIndex(size_t n, int jobs, F&& f) {
#ifdef DENAT_HAVE_OPENMP
    if (jobs != 1 && n > 1) {
        int threads = jobs <= 0 ? defaultJobs() : jobs;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            f(static_cast<size_t>(i));
        return;
    }
#else
    (void)jobs;
#endif
    forIndexSerial(n, f);
}

}  // namespace denat::par
