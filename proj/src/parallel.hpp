#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace qmsd::detail {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("QMSD_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<int>(std::min<long>(v, 1024));
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(block) for every block in [0, n_blocks).  Workers claim blocks
// through a shared counter; callers must make per-block work independent of
// claim order.
template <typename Fn>
void parallel_blocks(long long n_blocks, int threads, Fn&& fn) {
    threads = std::min<long long>(std::max(threads, 1), n_blocks);
    if (threads <= 1) {
        for (long long b = 0; b < n_blocks; ++b) fn(b);
        return;
    }
    std::atomic<long long> next{0};
    auto worker = [&] {
        for (;;) {
            const long long b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= n_blocks) return;
            fn(b);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads) - 1);
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

}  // namespace qmsd::detail
