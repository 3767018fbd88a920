#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace momgraph {

// Worker count used when a caller passes threads == 0: MOMGRAPH_THREADS if
// set, otherwise the hardware concurrency.
inline unsigned default_threads() {
    if (const char* env = std::getenv("MOMGRAPH_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(chunk_begin, chunk_end, chunk_index) over [0, n) split into
// contiguous chunks. Chunk boundaries depend only on n and `chunks`, never on
// the number of threads, so per-chunk partial results combined in chunk order
// are schedule independent. The first exception thrown by any chunk is
// rethrown on the calling thread.
template <typename Body>
void parallel_chunks(std::size_t n, std::size_t chunks, unsigned threads, Body&& body) {
    if (n == 0) return;
    chunks = std::max<std::size_t>(1, std::min(chunks, n));
    if (threads == 0) threads = default_threads();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, chunks));

    auto bounds = [&](std::size_t c) { return std::pair{n * c / chunks, n * (c + 1) / chunks}; };

    if (threads <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            auto [b, e] = bounds(c);
            body(b, e, c);
        }
        return;
    }

    std::mutex mu;
    std::size_t next = 0;
    std::exception_ptr error;
    auto worker = [&] {
        for (;;) {
            std::size_t c;
            {
                std::lock_guard lock(mu);
                if (next >= chunks || error) return;
                c = next++;
            }
            try {
                auto [b, e] = bounds(c);
                body(b, e, c);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// One task per index; tasks[i] results must be written to slot i by the body.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
    parallel_chunks(n, n, threads, [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t i = b; i < e; ++i) body(i);
    });
}

}  // namespace momgraph
