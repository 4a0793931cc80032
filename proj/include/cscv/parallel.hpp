#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace cscv {

// Run fn(i) for i in [0, count) across at most `jobs` threads (jobs <= 0
// selects the hardware count). Work items claim indices from a shared
// counter; callers that need reproducible aggregates must write results into
// per-index slots and reduce in index order afterwards. The first exception
// thrown by any item is rethrown on the calling thread.
inline void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
    if (count <= 0)
        return;
    if (jobs <= 0)
        jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1)
        jobs = 1;
    if (jobs > count)
        jobs = count;

    if (jobs == 1) {
        for (int i = 0; i < count; ++i)
            fn(i);
        return;
    }

    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&]() {
        while (!failed.load(std::memory_order_relaxed)) {
            const int i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count)
                return;
            try {
                fn(i);
            } catch (...) {
                {
                    std::scoped_lock lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back(worker);
    for (std::thread& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace cscv
