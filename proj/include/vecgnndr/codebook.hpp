#ifndef VECGNNDR_CODEBOOK_HPP
#define VECGNNDR_CODEBOOK_HPP

#include <cstdint>
#include <vector>

#include "vecgnndr/channels.hpp"
#include "vecgnndr/types.hpp"

namespace vecgnndr {

// Posterior statistics of the whitened input: mu_hat = Sigma^{-1/2} mu_color,
// Sigma_hat = Sigma^{-1/2} Sigma_color Sigma^{-1/2}.
PosteriorStats whiten_stats(const VectorXcd& mu_color,
                            const MatrixXcd& sigma_color,
                            const MatrixXcd& sigma);

// Score of the diagonal Gaussian codebook density with respect to the power
// weights: S_i(x) = |x_i|^2 / (P lambda_i^2) - 1 / lambda_i. The default
// power 1 matches the unit-power convention of the self-consistent
// equations.
VectorXd score(const VectorXcd& x, const VectorXd& lambdas, double power = 1.0);

// Scalar pieces of the covariance objective, applied to Hermitian matrices
// through their eigendecompositions. G satisfies x G'(x) = -(P + (x-P)_+)/P.
double cb_G(double x, double power);
double cb_G_prime(double x, double power);

// A channel driven by a colored (diagonal-covariance) Gaussian codebook:
// observation sampling, colored posterior statistics, and exact posterior
// draws, all parameterized by the power weights lambda. make_posterior_draw
// returns a per-observation sampler so factorizations are done once per
// observation rather than once per draw.
struct ColoredChannel {
    int b_x = 1;
    double power = 1.0;
    std::function<Observation(const VectorXd&, Rng&)> sample_obs;
    std::function<PosteriorStats(const Observation&, const VectorXd&)> posterior;
    std::function<std::function<VectorXcd(Rng&)>(const Observation&,
                                                 const VectorXd&)>
        make_posterior_draw;
};

// ACGNC instance with exact Gaussian posterior under the colored codebook.
ColoredChannel make_acgnc_colored_channel(const AcgncParams& p);

struct DeltaEstimate {
    double value = 0.0;
    double std_err = 0.0;
};

// Nested Monte Carlo estimate of the covariance-coupling term Delta_i:
// outer draws of the observation, inner posterior draws feeding the
// centered-score covariance term and the conditional score mean.
DeltaEstimate delta_i(const ColoredChannel& ch, const VectorXd& lambdas, int i,
                      std::int64_t n_outer, std::int64_t n_inner,
                      std::uint64_t seed, int threads = 0);

// Solves the multiplier nu in the trace constraint
//   sum_i (P + pos_i) / (P (nu - delta_i)) = B_x,  nu > max_i delta_i,
// by bisection (the left side is strictly decreasing in nu) and returns the
// resulting weights. The trace constraint holds to 1e-10.
VectorXd allocate_power(const VectorXd& pos, const VectorXd& delta,
                        double power);

// One undamped step of the self-consistent power-allocation equations:
// estimates E[(Sigma_hat - P I)_+]_{ii} and Delta_i by nested Monte Carlo,
// then applies allocate_power.
VectorXd fixed_point_step(const ColoredChannel& ch, const VectorXd& lambdas,
                          std::int64_t n_samples, std::uint64_t seed,
                          int threads = 0);

// Monte Carlo covariance objective J(Sigma) = E[tr G(Sigma_hat)], i.e. B_x
// times the eigenvalue part of the optimal GMI under the colored codebook.
GmiEstimate codebook_objective(const ColoredChannel& ch,
                               const VectorXd& lambdas, std::int64_t n_samples,
                               std::uint64_t seed, int threads = 0);

struct FixedPointTrace {
    std::vector<VectorXd> iterates;   // includes the starting point
    std::vector<double> objective;    // J at each iterate
    bool converged = false;
};

// Damped fixed-point iteration (lambda <- (step + old)/2), stopping when the
// largest component change falls below tol or the iteration budget runs out.
// Convergence is reported, not asserted.
FixedPointTrace fixed_point_iterate(const ColoredChannel& ch, VectorXd lambda0,
                                    int max_iters, double tol,
                                    std::int64_t n_samples, std::uint64_t seed,
                                    int threads = 0,
                                    bool track_objective = true);

}  // namespace vecgnndr

#endif
