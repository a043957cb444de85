#pragma once

// Chunked work scheduling. The chunk decomposition is fixed by the problem,
// never by the thread count, and every chunk writes only its own slot, so
// results are identical for any number of workers.

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace domlc {

// requested <= 0 means: $THREADS if set, else hardware concurrency.
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

template <typename Fn>
void run_chunks(std::size_t chunk_count, int threads, Fn&& body) {
    threads = resolve_threads(threads);
    if (threads <= 1 || chunk_count <= 1) {
        for (std::size_t i = 0; i < chunk_count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= chunk_count) return;
            body(i);
        }
    };
    std::vector<std::thread> pool;
    int nworkers = static_cast<int>(std::min<std::size_t>(threads, chunk_count));
    pool.reserve(nworkers);
    for (int t = 0; t < nworkers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace domlc
