#ifndef CMIX_WORKER_POOL_HPP
#define CMIX_WORKER_POOL_HPP

#include <cstddef>
#include <functional>

namespace cmix {

// Index-parallel execution. Tasks must write only to their own output slot;
// callers reduce the slots sequentially afterwards, so results never depend
// on scheduling order.
class WorkerPool {
public:
    // workers == 0 picks std::thread::hardware_concurrency().
    explicit WorkerPool(unsigned workers = 0);

    unsigned size() const { return workers_; }

    // Runs fn(i) for every i in [0, n). Exceptions from tasks are rethrown
    // on the calling thread after all workers finished.
    void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) const;

private:
    unsigned workers_;
};

// Sequential fallback when no pool is supplied.
void for_each_index(const WorkerPool* pool, std::size_t n,
                    const std::function<void(std::size_t)>& fn);

}  // namespace cmix

#endif
