#include "vecgnndr/stats.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace vecgnndr {

void StreamingMoments::merge(const StreamingMoments& o) {
    if (o.count == 0) return;
    if (count == 0) {
        *this = o;
        return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(o.count);
    const double d = o.mean - mean;
    const double n = na + nb;
    mean += d * nb / n;
    m2 += o.m2 + d * d * na * nb / n;
    count += o.count;
}

double StreamingMoments::std_err_of_mean() const {
    if (count < 2) return 0.0;
    return std::sqrt(variance() / static_cast<double>(count));
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("VECGNNDR_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

BlockPlan plan_blocks(std::int64_t n_samples) {
    // Fixed granularity so that stream assignment is independent of the
    // number of workers.
    const std::int64_t target_blocks = 64;
    std::int64_t block_size = (n_samples + target_blocks - 1) / target_blocks;
    if (block_size < 1) block_size = 1;
    const std::int64_t n_blocks = (n_samples + block_size - 1) / block_size;
    return {n_blocks, block_size, n_samples};
}

void parallel_blocks(std::int64_t n_blocks, std::uint64_t /*seed*/,
                     const std::function<void(std::int64_t)>& fn, int threads) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n_blocks <= 1) {
        for (std::int64_t b = 0; b < n_blocks; ++b) fn(b);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    const int n_workers = static_cast<int>(std::min<std::int64_t>(threads, n_blocks));
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::int64_t b = next.fetch_add(1);
                if (b >= n_blocks) return;
                try {
                    fn(b);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace vecgnndr
