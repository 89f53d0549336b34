#ifndef VECGNNDR_MCMC_HPP
#define VECGNNDR_MCMC_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "vecgnndr/channels.hpp"
#include "vecgnndr/types.hpp"

namespace vecgnndr {

struct McmcConfig {
    int n_iters = 10000;
    int burn_in = 2000;
    double step = 0.1;   // random-walk proposal scale on the increments
    int n_chains = 4;
    std::uint64_t seed = 0;
    // Robbins-Monro tuning of the proposal scale toward acceptance 0.3,
    // active only during burn-in so the retained samples target the exact
    // posterior.
    bool adapt_step = true;
};

struct McmcDiagnostics {
    double acceptance_rate = 0.0;  // post-burn-in proposals, pooled
    std::vector<VectorXcd> per_chain_means;
    double split_spread = 0.0;     // max pairwise chain-mean distance
    double tuned_step = 0.0;
};

// Gibbs sampler for the phase-noise posterior: componentwise conditional
// Gaussian draws of x given the phases, and a random-walk Metropolis step
// on the Brownian increments z (phi_i = c sum_{j<=i} z_j). Returns the
// pooled post-burn-in mean and (1/N_eff-normalized) covariance.
std::pair<PosteriorStats, McmcDiagnostics> mcmc_posterior(
    const VectorXcd& y, const PhaseNoiseParams& params,
    const McmcConfig& config);

// Single-chain run returning the retained x draws; with use_likelihood
// false the chain targets the prior on z only (sanity hook).
struct ChainResult {
    std::vector<VectorXcd> x_draws;
    std::vector<VectorXd> z_draws;
    double acceptance_rate = 0.0;
    double tuned_step = 0.0;
};
ChainResult mcmc_run_chain(const VectorXcd& y, const PhaseNoiseParams& params,
                           const McmcConfig& config, std::uint64_t chain_seed,
                           bool use_likelihood = true);

// Independent low-dimensional oracle: integrates the conditional-on-phase
// Gaussian posterior against the phase law on a deterministic grid
// (iterated Gauss-Hermite), to 1e-8 absolute tolerance per entry.
// Restricted to B_x <= 3.
PosteriorStats quadrature_posterior(const VectorXcd& y,
                                    const PhaseNoiseParams& params);

}  // namespace vecgnndr

#endif
