#pragma once

/// @file parallel.hpp
/// @brief Deterministic fork-join helper for independent trial loops.
///
/// Thread count comes from the LVIG_THREADS environment variable (falling
/// back to the hardware count). Callers must write results into
/// index-addressed slots so the outcome is identical for any thread count.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lvig {

/// Worker count: LVIG_THREADS if set (clamped to [1, 256]), else hardware.
inline int thread_count() {
    if (const char* env = std::getenv("LVIG_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(v > 256 ? 256 : v);
        return 1;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs f(i) for i in [0, count). Work is pulled from a shared counter, so
/// ordering is nondeterministic — f must only write to slot i of preallocated
/// storage. The first exception thrown by any worker is rethrown here.
template <typename F>
void parallel_for(std::size_t count, F&& f) {
    const int threads = thread_count();
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int spawn = static_cast<int>(
        count < static_cast<std::size_t>(threads) ? count : threads);
    pool.reserve(static_cast<std::size_t>(spawn));
    for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace lvig
