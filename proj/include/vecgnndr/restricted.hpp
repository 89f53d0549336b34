#ifndef VECGNNDR_RESTRICTED_HPP
#define VECGNNDR_RESTRICTED_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "vecgnndr/types.hpp"

namespace vecgnndr {

enum class Variant { cssf, cmsf, csi_ssf, csi_msf, lin };

const char* variant_name(Variant v);

struct RestrictedVariantResult {
    Variant variant;
    GmiEstimate gmi;
    MetricProvider metric_provider;
};

// Constant scalar scaling: T = B_x^{-1} tr E[Sigma(Y,V)] by sample mean,
// GMI = log(P/T); degenerate (zero metric) when T reaches P. The optional
// stats provider lets the result carry a usable decoding metric
// g(y,v) = sqrt(P/(T(P-T))) mu(y,v), f = sqrt((P-T)/(PT)) I.
RestrictedVariantResult cssf(const StatsSampler& stats_sampler, double power,
                             std::int64_t n_samples, std::uint64_t seed,
                             int threads = 0,
                             const StatsProvider& stats_provider = nullptr);

// Constant matrix scaling from the eigenpairs of E[Sigma(Y,V)], directions
// at the power level dropped.
RestrictedVariantResult cmsf(const StatsSampler& stats_sampler, double power,
                             std::int64_t n_samples, std::uint64_t seed,
                             int threads = 0,
                             const StatsProvider& stats_provider = nullptr);

// CSI-dependent variants: nested Monte Carlo with sqrt(n) outer draws of V
// and sqrt(n) inner draws of Y given v.
using CsiSampler = std::function<int(Rng&)>;
using StatsGivenCsi = std::function<PosteriorStats(int, Rng&)>;

RestrictedVariantResult csi_ssf(const CsiSampler& v_sampler,
                                const StatsGivenCsi& stats_given_v,
                                double power, std::int64_t n_samples,
                                std::uint64_t seed, int threads = 0);

RestrictedVariantResult csi_msf(const CsiSampler& v_sampler,
                                const StatsGivenCsi& stats_given_v,
                                double power, std::int64_t n_samples,
                                std::uint64_t seed, int threads = 0);

// Linear processing with CSI-dependent matrix scaling, from per-v
// conditional correlation matrices (exact, for a finite CSI alphabet).
struct CorrelationPair {
    MatrixXcd xy;  // E[X Y^H | v]
    MatrixXcd yy;  // E[Y Y^H | v]
};
using CorrelationsProvider = std::function<CorrelationPair(int)>;

RestrictedVariantResult linear_variant(const CorrelationsProvider& correlations,
                                       const std::vector<double>& v_probs,
                                       double power);

// Same GMI from sampled correlation matrices; the standard error comes from
// batch means over sample blocks.
RestrictedVariantResult linear_variant_sampled(const JointSampler& sampler,
                                               double power,
                                               std::int64_t n_samples,
                                               std::uint64_t seed,
                                               int threads = 0);

// The matrix Q(v) and its induced GMI term, exposed for tests.
MatrixXcd linear_q_matrix(const CorrelationPair& corr, double power);

struct OrderingInputs {
    GmiEstimate opt;
    GmiEstimate csi_msf;
    GmiEstimate csi_ssf;
    GmiEstimate cmsf;
    GmiEstimate cssf;
    GmiEstimate lin;
};

struct OrderingCheck {
    std::string name;
    double slack;     // left - right of the inequality
    double tol;       // 3 * combined standard error
    bool pass;
};

struct OrderingReport {
    std::vector<OrderingCheck> checks;
    bool all_pass;
};

// Verifies opt >= csi_msf >= max(csi_ssf, cmsf) >= cssf and lin <= csi_msf,
// each within three combined standard errors.
OrderingReport ordering_check(const OrderingInputs& in);

}  // namespace vecgnndr

#endif
