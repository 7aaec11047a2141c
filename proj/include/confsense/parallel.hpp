#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace confsense {

/// Worker-thread cap: CONFSENSE_THREADS if set (clamped to >= 1), otherwise
/// the hardware concurrency.
inline std::size_t max_threads() {
    if (const char* env = std::getenv("CONFSENSE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<std::size_t>(v);
        return 1;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs f(begin, end) over [0, n) split into fixed-size chunks. Chunks are
/// claimed by an atomic counter; outputs must go to disjoint ranges, which
/// keeps results identical for every thread count.
template <typename F>
void for_each_chunk(std::size_t n, std::size_t chunk_size, F&& f) {
    if (n == 0) return;
    const std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
    const std::size_t n_threads = std::min(max_threads(), n_chunks);

    if (n_threads <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) {
            f(c * chunk_size, std::min(n, (c + 1) * chunk_size));
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            try {
                f(c * chunk_size, std::min(n, (c + 1) * chunk_size));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace confsense
