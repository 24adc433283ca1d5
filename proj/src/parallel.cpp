#include "manelab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace manelab {

int thread_budget() {
    unsigned hw = std::thread::hardware_concurrency();
    int n = hw ? static_cast<int>(hw) : 1;
    if (const char* s = std::getenv("MANELAB_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(s, &end, 10);
        if (end == s || *end != '\0' || v < 1)
            throw ConfigError("MANELAB_THREADS must be a positive integer");
        n = static_cast<int>(std::min<long>(v, 256));
    }
    return n;
}

void parallel_chunks(long long n, long long chunk,
                     const std::function<void(long long, long long)>& fn) {
    if (n <= 0) return;
    if (chunk < 1) chunk = 1;
    const int workers = std::min<long long>(thread_budget(), (n + chunk - 1) / chunk);
    if (workers <= 1) {
        for (long long b = 0; b < n; b += chunk) fn(b, std::min(n, b + chunk));
        return;
    }
    std::atomic<long long> next{0};
    std::exception_ptr first_error = nullptr;
    std::mutex error_lock;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                long long b = next.fetch_add(chunk);
                if (b >= n) return;
                try {
                    fn(b, std::min(n, b + chunk));
                } catch (...) {
                    std::lock_guard<std::mutex> guard(error_lock);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace manelab
