#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace mcmimo {

/// 0 or negative -> hardware concurrency (at least 1).
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(chunk_index, begin, end) over [0, n_items) split into fixed-size
/// chunks. The chunk layout depends only on n_items and chunk_size, never on
/// the thread count, so per-chunk results indexed by chunk_index merge into
/// a parallelism-independent total.
inline void parallel_chunks(std::uint64_t n_items, std::uint64_t chunk_size, int n_threads,
                            const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& fn) {
    if (n_items == 0) return;
    if (chunk_size == 0) chunk_size = 1;
    const std::uint64_t n_chunks = (n_items + chunk_size - 1) / chunk_size;
    n_threads = resolve_threads(n_threads);
    if (n_threads == 1 || n_chunks == 1) {
        for (std::uint64_t c = 0; c < n_chunks; ++c)
            fn(c, c * chunk_size, std::min(n_items, (c + 1) * chunk_size));
        return;
    }
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            fn(c, c * chunk_size, std::min(n_items, (c + 1) * chunk_size));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads - 1);
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

} // namespace mcmimo
