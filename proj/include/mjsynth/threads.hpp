#pragma once

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace mjsynth {

/// Worker-thread cap: the requested count clamped by the MS_THREADS
/// environment variable when it is set.
inline int effective_threads(int requested) {
    if (requested < 1) requested = 1;
    if (const char* env = std::getenv("MS_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1 && cap < requested) requested = cap;
        } catch (...) {
            // unparsable cap is ignored
        }
    }
    return requested;
}

/// Runs fn(i) for i in [0, n). Each index is independent; results written
/// to slot i are identical whether the loop runs serially or concurrently.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& fn) {
    threads = effective_threads(threads);
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    pool.reserve(count);
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

} // namespace mjsynth
