#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ppp {

// Worker count: PPP_THREADS if set to a positive integer, else the hardware
// concurrency. Only affects speed; results never depend on it.
inline std::size_t worker_count() {
    if (const char* env = std::getenv("PPP_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Calls fn(block) for block = 0 .. blocks-1, spread over worker threads.
// Blocks are claimed dynamically, so fn must write only to block-owned
// storage. The first exception thrown by any block is rethrown.
template <class Fn>
void for_each_block(std::size_t blocks, Fn&& fn) {
    const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(blocks, 1));
    if (workers <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) fn(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= blocks) return;
            try {
                fn(b);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(blocks);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace ppp
