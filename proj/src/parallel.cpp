#include "vinedist/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace vinedist {

int default_workers() {
    if (const char* env = std::getenv("VINEDIST_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t, int)>& fn) {
    if (workers <= 0) workers = default_workers();
    if (n == 0) return;
    if (workers == 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i, 0);
        return;
    }
    const int nw = static_cast<int>(std::min<std::size_t>(workers, n));
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> threads;
    threads.reserve(nw);
    for (int w = 0; w < nw; ++w) {
        threads.emplace_back([&, w]() {
            try {
                while (!failed.load(std::memory_order_relaxed)) {
                    const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
                    if (i >= n) break;
                    fn(i, w);
                }
            } catch (...) {
                if (!failed.exchange(true)) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace vinedist
