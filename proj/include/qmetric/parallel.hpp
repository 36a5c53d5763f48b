#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace qmetric {

// Index-parallel loop over [0, n). Work items own their seeds, so results do
// not depend on the worker count or scheduling; the first exception wins and
// is rethrown after all workers join.
inline void parallel_for(std::int64_t n, int workers,
                         const std::function<void(std::int64_t)>& fn) {
    if (n <= 0) return;
    if (workers < 1) workers = 1;
    if (workers == 1 || n == 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::vector<std::thread> pool;
    const int count = int(std::min<std::int64_t>(workers, n));
    std::mutex error_mutex;
    for (int w = 0; w < count; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n || failed.load(std::memory_order_relaxed)) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true, std::memory_order_relaxed);
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace qmetric
