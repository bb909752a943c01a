#pragma once

#include <atomic>
#include <exception>

namespace ghostfd {

enum class ExecPolicy { Serial, Parallel };

/// Runs f(k) for k in [0,n). The parallel path captures the first exception
/// thrown by a worker and rethrows it on the calling thread.
template <class F>
void parallel_for(int n, ExecPolicy policy, F&& f) {
    if (policy == ExecPolicy::Serial) {
        for (int k = 0; k < n; ++k) f(k);
        return;
    }
    std::atomic<bool> failed{false};
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 32)
    for (int k = 0; k < n; ++k) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            f(k);
        } catch (...) {
#pragma omp critical(ghostfd_parallel_for_err)
            {
                if (!failed.exchange(true)) err = std::current_exception();
            }
        }
    }
    if (failed) std::rethrow_exception(err);
}

}  // namespace ghostfd
