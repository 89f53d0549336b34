#include "vecgnndr/decoder.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "vecgnndr/stats.hpp"

namespace vecgnndr {

double Codebook::rate() const {
    return std::log(static_cast<double>(m)) / (static_cast<double>(l) * b_x);
}

Codebook generate_codebook(int m, int l, int b_x, double power,
                           const MatrixXcd& sigma, Rng& rng) {
    if (m < 1 || l < 1 || b_x < 1)
        throw std::invalid_argument("generate_codebook: M, L, B_x must be >= 1");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sigma);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument(
            "generate_codebook: input covariance must be positive definite");
    const MatrixXcd half = std::sqrt(power) * es.operatorSqrt();

    Codebook cb;
    cb.m = m;
    cb.l = l;
    cb.b_x = b_x;
    cb.power = power;
    cb.sigma = sigma;
    cb.blocks.resize(l);
    for (int bl = 0; bl < l; ++bl) {
        cb.blocks[bl].resize(m, b_x);
        for (int msg = 0; msg < m; ++msg)
            cb.blocks[bl].row(msg) = (half * rng.cnormal_vec(b_x, 1.0)).transpose();
    }
    return cb;
}

int decode(const MetricProvider& metric, const Codebook& cb,
           const std::vector<Observation>& received) {
    if (static_cast<int>(received.size()) != cb.l)
        throw std::invalid_argument("decode: received length must equal L");
    VectorXd scores = VectorXd::Zero(cb.m);
    for (int bl = 0; bl < cb.l; ++bl) {
        const MetricFactors mf = metric(received[bl]);
        for (int msg = 0; msg < cb.m; ++msg) {
            const VectorXcd x = cb.blocks[bl].row(msg).transpose();
            scores[msg] += (mf.g - mf.f * x).squaredNorm();
        }
    }
    int best = 0;
    scores.minCoeff(&best);  // first minimum: ties break to smallest index
    return best;
}

namespace {

using Eigen::MatrixXf;

int feature_count(int b_x) { return 2 * b_x + b_x * b_x; }

// Message-dependent metric features: Re/Im of each entry, squared moduli,
// and Re/Im of the upper-triangle cross products.
void fill_features(const MatrixXcd& block, MatrixXf& feat) {
    const int m = static_cast<int>(block.rows());
    const int bx = static_cast<int>(block.cols());
    feat.resize(m, feature_count(bx));
    for (int msg = 0; msg < m; ++msg) {
        int col = 0;
        for (int j = 0; j < bx; ++j)
            feat(msg, col++) = static_cast<float>(block(msg, j).real());
        for (int j = 0; j < bx; ++j)
            feat(msg, col++) = static_cast<float>(block(msg, j).imag());
        for (int j = 0; j < bx; ++j)
            feat(msg, col++) = static_cast<float>(std::norm(block(msg, j)));
        for (int j = 0; j < bx; ++j)
            for (int k = j + 1; k < bx; ++k) {
                const cplx u = std::conj(block(msg, j)) * block(msg, k);
                feat(msg, col++) = static_cast<float>(u.real());
                feat(msg, col++) = static_cast<float>(u.imag());
            }
    }
}

// Coefficients pairing with the features above for one observation's metric
// (constant terms dropped; they shift all messages equally).
void fill_coefficients(const MetricFactors& mf, int b_x, float* coef) {
    const VectorXcd a = mf.f.adjoint() * mf.g;
    const MatrixXcd h = mf.f.adjoint() * mf.f;
    int idx = 0;
    for (int j = 0; j < b_x; ++j)
        coef[idx++] = static_cast<float>(-2.0 * a[j].real());
    for (int j = 0; j < b_x; ++j)
        coef[idx++] = static_cast<float>(-2.0 * a[j].imag());
    for (int j = 0; j < b_x; ++j)
        coef[idx++] = static_cast<float>(h(j, j).real());
    for (int j = 0; j < b_x; ++j)
        for (int k = j + 1; k < b_x; ++k) {
            coef[idx++] = static_cast<float>(2.0 * h(j, k).real());
            coef[idx++] = static_cast<float>(-2.0 * h(j, k).imag());
        }
}

}  // namespace

ErrorRateResult block_error_rate(const TransmitChannel& channel,
                                 const MetricProvider& metric, double rate,
                                 int l, int b_x, double power,
                                 std::int64_t trials, std::uint64_t seed,
                                 int threads) {
    const double log_m = rate * l * b_x;
    int m;
    if (log_m >= std::log(static_cast<double>(kMaxMessages)))
        m = kMaxMessages;  // exponential codebook sizes are clamped
    else
        m = std::max(1, static_cast<int>(std::ceil(std::exp(log_m) - 1e-9)));

    Rng cb_rng = derive_stream(seed, 0);
    const Codebook cb = generate_codebook(
        m, l, b_x, power, MatrixXcd::Identity(b_x, b_x), cb_rng);

    std::vector<MatrixXf> features(l);
    for (int bl = 0; bl < l; ++bl) fill_features(cb.blocks[bl], features[bl]);

    const int fdim = feature_count(b_x);
    const std::int64_t chunk = 128;
    const std::int64_t n_chunks = (trials + chunk - 1) / chunk;
    std::vector<std::int64_t> chunk_errors(n_chunks, 0);

    parallel_blocks(
        n_chunks, seed,
        [&](std::int64_t ci) {
            const std::int64_t t0 = ci * chunk;
            const std::int64_t t1 = std::min<std::int64_t>(t0 + chunk, trials);
            const int tc = static_cast<int>(t1 - t0);
            std::vector<int> sent(tc);
            std::vector<MatrixXf> coef(l);
            for (int bl = 0; bl < l; ++bl) coef[bl].resize(fdim, tc);

            for (int t = 0; t < tc; ++t) {
                Rng rng = derive_stream(seed, 1 + static_cast<std::uint64_t>(t0 + t));
                sent[t] = static_cast<int>(rng.uniform() * m);
                if (sent[t] >= m) sent[t] = m - 1;
                for (int bl = 0; bl < l; ++bl) {
                    const VectorXcd x = cb.blocks[bl].row(sent[t]).transpose();
                    const Observation obs = channel(x, rng);
                    const MetricFactors mf = metric(obs);
                    fill_coefficients(mf, b_x, coef[bl].col(t).data());
                }
            }

            MatrixXf scores = MatrixXf::Zero(m, tc);
            for (int bl = 0; bl < l; ++bl)
                scores.noalias() += features[bl] * coef[bl];

            std::int64_t errs = 0;
            for (int t = 0; t < tc; ++t) {
                int best = 0;
                scores.col(t).minCoeff(&best);
                if (best != sent[t]) ++errs;
            }
            chunk_errors[ci] = errs;
        },
        threads);

    std::int64_t total_errors = 0;
    for (std::int64_t e : chunk_errors) total_errors += e;

    ErrorRateResult out;
    out.trials = trials;
    out.m = m;
    out.effective_rate = cb.rate();
    out.error_rate =
        static_cast<double>(total_errors) / static_cast<double>(trials);
    const double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = out.error_rate;
    out.wilson_halfwidth =
        z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) /
        (1.0 + z * z / n);
    return out;
}

}  // namespace vecgnndr
