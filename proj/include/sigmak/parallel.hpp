#pragma once

#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace sigmak {

/// Width for node-parallel field evaluation. SIGMAK_THREADS caps it;
/// unset means hardware concurrency.
inline int max_threads() {
    static const int cached = [] {
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw < 1) hw = 1;
        if (const char* env = std::getenv("SIGMAK_THREADS")) {
            const int cap = std::atoi(env);
            if (cap >= 1 && cap < hw) hw = cap;
        }
        return hw;
    }();
    return cached;
}

/// Run fn(i) for i in [0, total), splitting into contiguous chunks across
/// threads. fn must only write state owned by index i, so the result is
/// identical for any thread count. Small ranges run inline.
template <typename F>
void parallel_for(std::int64_t total, F&& fn) {
    const int threads = max_threads();
    if (threads <= 1 || total < 4096) {
        for (std::int64_t i = 0; i < total; ++i) fn(i);
        return;
    }
    const std::int64_t chunk = (total + threads - 1) / threads;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        const std::int64_t lo = t * chunk;
        const std::int64_t hi = std::min(total, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::int64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (std::thread& th : pool) th.join();
}

}  // namespace sigmak
