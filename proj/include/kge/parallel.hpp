#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace kge {

/// Run fn(begin, end) over [0, n) split into contiguous chunks, one per
/// worker. Chunk boundaries depend only on (n, threads), never on timing,
/// so any reduction that combines chunk results in chunk order is
/// deterministic.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    if (threads <= 1 || n == 1) {
        fn(0, n);
        return;
    }
    std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t begin = w * chunk;
        std::size_t end = std::min(begin + chunk, n);
        if (begin >= end) break;
        pool.emplace_back(fn, begin, end);
    }
    for (auto& t : pool) t.join();
}

}  // namespace kge
