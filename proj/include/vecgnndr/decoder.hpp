#ifndef VECGNNDR_DECODER_HPP
#define VECGNNDR_DECODER_HPP

#include <cstdint>
#include <vector>

#include "vecgnndr/rng.hpp"
#include "vecgnndr/types.hpp"

namespace vecgnndr {

// Gaussian random codebook: M codewords of L blocks, each block a length-B_x
// vector drawn i.i.d. from CN(0, P * Sigma).
struct Codebook {
    int m = 1;
    int l = 1;
    int b_x = 1;
    double power = 1.0;
    MatrixXcd sigma;               // input covariance (identity by default)
    std::vector<MatrixXcd> blocks; // L entries, each M x B_x

    double rate() const;  // log(M) / (L * B_x), nats per symbol
};

Codebook generate_codebook(int m, int l, int b_x, double power,
                           const MatrixXcd& sigma, Rng& rng);

// Nearest-neighbor argmin of Eq-style block metrics over all messages; ties
// break toward the smallest index.
int decode(const MetricProvider& metric, const Codebook& cb,
           const std::vector<Observation>& received);

// Per-trial channel use: maps a transmitted block to an observation.
using TransmitChannel = std::function<Observation(const VectorXcd&, Rng&)>;

struct ErrorRateResult {
    double error_rate = 0.0;
    double wilson_halfwidth = 0.0;  // 95% confidence
    std::int64_t trials = 0;
    int m = 0;                       // realized codebook size
    double effective_rate = 0.0;     // log(M)/(L*B_x) actually simulated
};

// Hard cap on the number of messages; exponential codebook sizes above it
// are clamped and the effective rate reported.
inline constexpr int kMaxMessages = 1 << 16;

// Monte Carlo block-error rate of a metric at rate R (nats/symbol) over
// codeword length L. The message count is ceil(e^{R L B_x}), clamped to the
// cap. The codebook is drawn once from the trial stream; each trial then
// transmits a uniformly drawn message. The implementation batches the
// per-message metric accumulation into float matrix products.
ErrorRateResult block_error_rate(const TransmitChannel& channel,
                                 const MetricProvider& metric, double rate,
                                 int l, int b_x, double power,
                                 std::int64_t trials, std::uint64_t seed,
                                 int threads = 0);

}  // namespace vecgnndr

#endif
