#ifndef VECGNNDR_GMI_HPP
#define VECGNNDR_GMI_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "vecgnndr/rng.hpp"
#include "vecgnndr/types.hpp"

namespace vecgnndr {

// Per-sample statistics entering the empirical GMI objective of a fixed
// metric: the decoding distance for the drawn input and, per direction,
// |(U^H g)_i|^2 and the squared singular values of f.
struct MetricTermsBatch {
    VectorXd dist_sq;   // n
    MatrixXd g_abs_sq;  // n x B_x, zero-padded when f has fewer rows
    MatrixXd sigma_sq;  // n x B_x

    std::int64_t size() const { return dist_sq.size(); }
    int block_len() const { return static_cast<int>(g_abs_sq.cols()); }
};

// Fills row `row` of the batch from one metric evaluation and input draw.
void metric_sample_terms(const MetricFactors& m, const VectorXcd& x,
                         MetricTermsBatch& batch, std::int64_t row);

// Empirical objective at a given theta < 0 (nats per input symbol):
//   B_x^{-1} [ theta*E||g-fX||^2
//              - sum_i E[ theta*|g_i|^2 / (1 - theta*P*sigma_i^2) ]
//              + sum_i E[ log(1 - theta*P*sigma_i^2) ] ].
double gmi_objective(const MetricTermsBatch& terms, double theta, double power);

struct ThetaOpt {
    double theta_star = -1.0;
    double value = 0.0;
    bool degenerate = false;  // maximizer collapsed to theta -> 0^-
};

// One-dimensional concave maximization over theta < 0: golden section on a
// geometrically grown bracket, then parabolic refinement to 1e-10 in theta.
ThetaOpt maximize_theta(const MetricTermsBatch& terms, double power);

struct FixedMetricGmiInput {
    JointSampler joint_sampler;
    MetricProvider metric;
    double power = 1.0;
    std::int64_t n_samples = 100000;
    int block_len = 1;
    std::uint64_t seed = 0;
    int threads = 0;
    // When set, the objective is evaluated at this theta instead of
    // re-optimizing (used when scoring the synthesized optimal metric).
    std::optional<double> fixed_theta;
};

// GMI of an arbitrary fixed metric by Monte Carlo over i.i.d. channel
// draws. Standard error by the delta method at the maximizing theta.
GmiEstimate gmi_fixed_metric(const FixedMetricGmiInput& input);

// Collects the per-sample terms only (exposed for reuse by tests).
MetricTermsBatch collect_metric_terms(const FixedMetricGmiInput& input);

// GMI-optimal metric synthesized from posterior statistics:
//   g = diag(sqrt(P / ((P-[l_i]) [l_i]))) W^H mu,
//   f = diag(sqrt((P-[l_i]) / (P [l_i]))) W^H,
// with [l_i] the eps-truncated eigenvalues.
MetricFactors optimal_metric(const PosteriorStats& stats, double power,
                             double eps);

// Per-sample integrand of the optimal GMI, computed two algebraically
// independent ways: (a) sum of psi over eigenvalues plus ||mu||^2/P, and
// (b) the log-det form with the trace terms retained and the above-power
// correction subtracted. The two agree to 1e-10 per sample.
struct GmiIntegrandPair {
    double eig_route;
    double logdet_route;
};
GmiIntegrandPair optimal_gmi_integrand(const PosteriorStats& stats,
                                       double power);

// Optimal GMI by Monte Carlo over posterior-statistics draws; asserts the
// two integrand routes agree per sample.
GmiEstimate optimal_gmi(const StatsSampler& stats_sampler, double power,
                        std::int64_t n_samples, std::uint64_t seed,
                        int threads = 0);

// Closed form under the all-eigenvalues-below-P assumption; errors on the
// first sample that violates it.
GmiEstimate optimal_gmi_closed(const StatsSampler& stats_sampler, double power,
                               std::int64_t n_samples, std::uint64_t seed,
                               int threads = 0);

// Conditional (given one observation) objective of a metric at theta = -1,
// with the inner expectation over X|y,v taken analytically from the stats.
// Used to check the truncation-loss bound.
double conditional_objective_at_unit_theta(const PosteriorStats& stats,
                                           const MetricFactors& m,
                                           double power);

}  // namespace vecgnndr

#endif
