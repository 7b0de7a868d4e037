#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace mel {

// Worker count: hardware concurrency capped by the MEL_THREADS env var.
inline int worker_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* cap = std::getenv("MEL_THREADS")) {
        int m = std::atoi(cap);
        if (m >= 1) n = std::min(n, m);
    }
    return n;
}

// Runs fn(i) for i in [0, n). Results must be written to pre-sized storage
// indexed by i so output ordering is deterministic.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    int workers = worker_count();
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        std::size_t lo = static_cast<std::size_t>(w) * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace mel
