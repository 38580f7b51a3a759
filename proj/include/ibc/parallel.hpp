#ifndef IBC_PARALLEL_HPP
#define IBC_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace ibc {

/// Runs fn(i) for i in [0,n) on a small worker pool. Work items write to
/// disjoint slots, so results do not depend on the pool size.
inline void parallel_for(long n, const std::function<void(long)>& fn, int threads = 0) {
    if (n <= 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 4;
    const unsigned want = threads > 0 ? static_cast<unsigned>(threads) : hw;
    const unsigned k = static_cast<unsigned>(std::min<long>(n, want));
    if (k <= 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(k);
    for (unsigned w = 0; w < k; ++w) {
        pool.emplace_back([&] {
            while (!failed.load(std::memory_order_relaxed)) {
                const long i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) err = std::current_exception();
                    break;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace ibc

#endif
