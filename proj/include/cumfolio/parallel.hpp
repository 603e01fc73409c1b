#ifndef CUMFOLIO_PARALLEL_HPP
#define CUMFOLIO_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace cumfolio {

/// Run `fn(begin, end)` over contiguous chunks of [0, n) on up to
/// `threads` worker threads (0 = hardware concurrency). Each index is
/// processed by exactly one chunk, so writes to per-index slots stay
/// deterministic regardless of the thread count.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (n == 0) return;
    std::size_t n_threads = threads > 0
        ? static_cast<std::size_t>(threads)
        : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, n);
    if (n_threads <= 1) {
        fn(std::size_t{0}, n);
        return;
    }
    const std::size_t chunk = (n + n_threads - 1) / n_threads;
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        workers.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& w : workers) w.join();
}

}  // namespace cumfolio

#endif  // CUMFOLIO_PARALLEL_HPP
