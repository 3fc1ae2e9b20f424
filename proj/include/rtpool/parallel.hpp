#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rtpool {

/// Which implementation a kernel dispatches to. Serial is the reference
/// path kept for testing; Parallel uses OpenMP when compiled in and must
/// produce bit-identical results regardless of thread count.
enum class Exec { Serial, Parallel };

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline bool openmp_enabled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

}  // namespace rtpool
