#pragma once

#include <algorithm>
#include <cstdlib>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace dlab {

/// Worker cap: DOUBLING_LAB_THREADS if set (min 1), else hardware
/// concurrency, clamped to 8.
inline std::size_t thread_count() {
    if (const char* env = std::getenv("DOUBLING_LAB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
        return 1;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return std::min<std::size_t>(hc ? hc : 1, 8);
}

/// Runs body(begin, end) over disjoint chunks of [0, n). Each chunk writes
/// only to its own outputs, so the result is identical for every schedule
/// and thread count.
inline void parallel_chunks(std::size_t n,
                            const std::function<void(std::size_t, std::size_t)>& body) {
    const std::size_t workers = std::min(thread_count(), n == 0 ? std::size_t{1} : n);
    if (workers <= 1 || n < 2048) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace dlab
