#ifndef VECGNNDR_STATS_HPP
#define VECGNNDR_STATS_HPP

#include <cstdint>
#include <functional>
#include <vector>

namespace vecgnndr {

// Single-pass mean/variance accumulator (Welford) with an associative,
// commutative merge for pooling partial results.
struct StreamingMoments {
    std::int64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;  // sum of squared deviations from the mean

    void add(double x) {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }

    void merge(const StreamingMoments& o);

    double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
    double std_err_of_mean() const;
};

// Runs fn(block_index, rng_stream_for_block) over n_blocks fixed blocks.
// Blocks are distributed over up to `threads` workers; every block owns the
// stream derived from (seed, block_index), so results do not depend on the
// worker count. Callers reduce per-block outputs in block order.
void parallel_blocks(std::int64_t n_blocks, std::uint64_t seed,
                     const std::function<void(std::int64_t)>& fn, int threads);

// Thread count resolution: explicit argument, else VECGNNDR_THREADS, else
// hardware concurrency.
int resolve_threads(int requested);

// Splits n samples into fixed-size blocks (independent of thread count).
struct BlockPlan {
    std::int64_t n_blocks;
    std::int64_t block_size;  // last block may be short
    std::int64_t total;

    std::int64_t begin(std::int64_t b) const { return b * block_size; }
    std::int64_t end(std::int64_t b) const {
        const std::int64_t e = (b + 1) * block_size;
        return e < total ? e : total;
    }
};

BlockPlan plan_blocks(std::int64_t n_samples);

}  // namespace vecgnndr

#endif
