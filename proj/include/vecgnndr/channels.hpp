#ifndef VECGNNDR_CHANNELS_HPP
#define VECGNNDR_CHANNELS_HPP

#include <cmath>
#include <cstdint>
#include <utility>

#include "vecgnndr/gmi.hpp"
#include "vecgnndr/rng.hpp"
#include "vecgnndr/types.hpp"

namespace vecgnndr {

inline double snr_db_to_sigma2(double snr_db, double power = 1.0) {
    return power / std::pow(10.0, snr_db / 10.0);
}

// ---------------------------------------------------------------------------
// Block noncoherent AWGN channel: y = e^{i theta} x + n with one uniform
// rotation angle per block.
// ---------------------------------------------------------------------------

struct BlockNoncoherentParams {
    int b_x = 2;
    double power = 1.0;
    double sigma2 = 1.0;
};

struct BncDraw {
    VectorXcd x;
    double theta;
    VectorXcd y;
};

BncDraw bnc_sample(const BlockNoncoherentParams& p, Rng& rng);

// mu(y) = 0, Sigma(y) = P s^2/(P+s^2) I + (P/(P+s^2))^2 y y^H.
PosteriorStats bnc_posterior_stats(const VectorXcd& y,
                                   const BlockNoncoherentParams& p);

// Closed-form optimal GMI: deterministic quadrature of the chi^2(2 B_x)
// expectation on [0, 2] to absolute tolerance 1e-10.
GmiEstimate bnc_optimal_gmi(const BlockNoncoherentParams& p);

// Element-wise rule; independent of B_x.
GmiEstimate bnc_elementwise_gmi(const BlockNoncoherentParams& p);

// Two-branch optimal metric. Below the threshold ||y||^2 < P + s^2 the
// scaling is full rank; at or above it the first direction is removed
// outright (mu = 0 makes truncation unnecessary there).
MetricFactors bnc_optimal_metric(const VectorXcd& y,
                                 const BlockNoncoherentParams& p, double eps);

StatsSampler bnc_stats_sampler(const BlockNoncoherentParams& p);
JointSampler bnc_joint_sampler(const BlockNoncoherentParams& p);

// ---------------------------------------------------------------------------
// Phase noise channel: y = diag(e^{i phi}) x + n with the phases following
// a discrete Brownian motion within the block.
// ---------------------------------------------------------------------------

struct PhaseNoiseParams {
    int b_x = 2;
    double power = 1.0;
    double sigma2 = 1.0;
    double c = 0.1;  // diffusion intensity
};

struct PncDraw {
    VectorXcd x;
    VectorXd phi;
    VectorXcd y;
};

PncDraw pnc_sample(const PhaseNoiseParams& p, Rng& rng);

struct PncLinearResult {
    GmiEstimate gmi;
    VectorXd gamma;  // diagonal of the linear processing matrix
    VectorXd pi;     // diagonal of the scaling matrix
};

// Closed form for the linear-processing variant.
PncLinearResult pnc_linear_gmi(const PhaseNoiseParams& p);

// Identity decoding rule d(x, y) = ||y - x||^2: closed-form theta* and GMI.
GmiEstimate pnc_identity_gmi(const PhaseNoiseParams& p);
double pnc_identity_theta_star(const PhaseNoiseParams& p);
// The one-dimensional objective h(theta) behind the identity rule.
double pnc_identity_objective(const PhaseNoiseParams& p, double theta);
// High-SNR saturation value of the identity-rule GMI.
double pnc_identity_gmi_high_snr_limit(const PhaseNoiseParams& p);

JointSampler pnc_joint_sampler(const PhaseNoiseParams& p);

// ---------------------------------------------------------------------------
// Additive colored Gaussian noise channel: y = A x + n, n ~ CN(0, Sigma).
// ---------------------------------------------------------------------------

struct AcgncParams {
    MatrixXcd a;
    MatrixXcd sigma_noise;
    double power = 1.0;
};

struct AcgncOptimal {
    GmiEstimate gmi;  // B_x^{-1} log det(P A^H Sigma^{-1} A + I)
    MetricProvider metric;
};

VectorXcd acgnc_sample_y(const AcgncParams& p, const VectorXcd& x, Rng& rng);
JointSampler acgnc_joint_sampler(const AcgncParams& p);

// Conditional mean/covariance under the white Gaussian codebook; the
// covariance does not depend on y.
PosteriorStats acgnc_posterior_stats(const VectorXcd& y, const AcgncParams& p);
StatsSampler acgnc_stats_sampler(const AcgncParams& p);

// Closed-form optimal GMI and the metric f = Lambda W^H, g = U^H S^{-1/2} y
// from the SVD of S^{-1/2} A. The induced decoder is the ML decoder.
AcgncOptimal acgnc_optimal(const AcgncParams& p);

// Explicit ML decoding metric (y - Ax)^H Sigma^{-1} (y - Ax) expressed in
// metric-factor form for decoder cross-checks.
MetricProvider acgnc_ml_metric(const AcgncParams& p);

// ---------------------------------------------------------------------------
// Scalar (memoryless) wrapper: B_x = 1 specialization of the optimal rule.
// ---------------------------------------------------------------------------

struct MemorylessResult {
    GmiEstimate gmi;
    // Builds the scalar metric from scalar stats (mu, w).
    std::function<MetricFactors(const PosteriorStats&)> metric_from_stats;
};

MemorylessResult memoryless_gnndr(const StatsSampler& scalar_stats_sampler,
                                  double power, double eps,
                                  std::int64_t n_samples, std::uint64_t seed,
                                  int threads = 0);

}  // namespace vecgnndr

#endif
