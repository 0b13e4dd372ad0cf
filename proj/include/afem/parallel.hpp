#pragma once

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace afem {

// Worker cap from AFEM_THREADS (default 1 = sequential). Block decomposition
// is fixed by (n, grain) alone, so per-block partial results reduced in block
// order give the same answer for any thread count.
inline int max_threads() {
    static const int cached = [] {
        if (const char* env = std::getenv("AFEM_THREADS")) {
            const int v = std::atoi(env);
            if (v >= 1 && v <= 256) return v;
        }
        return 1;
    }();
    return cached;
}

// f(block_index, begin, end) over [0, n) split into blocks of size grain.
template <class F>
void parallel_blocks(std::size_t n, std::size_t grain, F&& f) {
    if (n == 0) return;
    if (grain == 0) grain = 1;
    const std::size_t n_blocks = (n + grain - 1) / grain;
    const int threads = max_threads();
    if (threads == 1 || n_blocks == 1) {
        for (std::size_t b = 0; b < n_blocks; ++b)
            f(b, b * grain, b + 1 == n_blocks ? n : (b + 1) * grain);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= n_blocks) return;
            f(b, b * grain, b + 1 == n_blocks ? n : (b + 1) * grain);
        }
    };
    const int spawn = static_cast<int>(std::min<std::size_t>(threads, n_blocks)) - 1;
    std::vector<std::thread> pool;
    pool.reserve(spawn);
    for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

} // namespace afem
