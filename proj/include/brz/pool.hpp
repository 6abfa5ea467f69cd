#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace brz {

// Number of workers: RENORM_THREADS caps the pool, hardware otherwise.
inline unsigned worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("RENORM_THREADS")) {
        const long cap = std::atol(env);
        if (cap >= 1 && cap < (long)hw) hw = (unsigned)cap;
    }
    return hw;
}

// Runs fn(i) for i in [0, n) on a worker pool. Work items must be independent;
// callers aggregate by index, so the output order never depends on scheduling.
inline void parallel_for_indexed(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& t : threads) t.join();
}

} // namespace brz
