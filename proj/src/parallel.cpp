#include "rgw/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace rgw {

namespace {

unsigned initial_threads() {
    if (const char* env = std::getenv("RGW_THREADS")) {
        try {
            int v = std::stoi(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Set on worker threads; nested loops then run inline instead of spawning more threads.
thread_local bool in_worker = false;

std::atomic<unsigned>& thread_setting() {
    static std::atomic<unsigned> n{initial_threads()};
    return n;
}

} // namespace

unsigned default_threads() { return thread_setting().load(); }

void set_default_threads(unsigned n) { thread_setting().store(std::max(1u, n)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = in_worker ? 1 : std::min<std::size_t>(default_threads(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex guard;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t lo = n * w / workers;
        std::size_t hi = n * (w + 1) / workers;
        pool.emplace_back([&, lo, hi] {
            in_worker = true;
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(guard);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace rgw
