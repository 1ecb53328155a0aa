#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ecim {

/// Calls body(i) for every i in [0, count) on a pool of worker threads.
///
/// Work items are claimed from a shared counter, so callers that need a
/// deterministic result must write into per-index slots and reduce afterwards.
/// The first exception thrown by any item is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t count, Body&& body, std::size_t max_threads = 0) {
    std::size_t workers = max_threads ? max_threads : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& thread : pool) thread.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace ecim
