#include "cmix/worker_pool.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cmix {

WorkerPool::WorkerPool(unsigned workers) : workers_(workers) {
    if (workers_ == 0) {
        workers_ = std::thread::hardware_concurrency();
        if (workers_ == 0) workers_ = 1;
    }
}

void WorkerPool::parallel_for(std::size_t n,
                              const std::function<void(std::size_t)>& fn) const {
    if (n == 0) return;
    unsigned threads = static_cast<unsigned>(std::min<std::size_t>(workers_, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n, std::memory_order_relaxed);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

void for_each_index(const WorkerPool* pool, std::size_t n,
                    const std::function<void(std::size_t)>& fn) {
    if (pool != nullptr) {
        pool->parallel_for(n, fn);
    } else {
        for (std::size_t i = 0; i < n; ++i) fn(i);
    }
}

}  // namespace cmix
