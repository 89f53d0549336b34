"""GMI-optimal vectorized nearest-neighbor decoding metrics for
in-block-memory channels."""

from ._vecgnndr import (  # noqa: F401
    acgnc_optimal_gmi,
    bnc_block_error_rate,
    bnc_elementwise_gmi,
    bnc_optimal_gmi,
    bnc_optimal_gmi_mc,
    bnc_optimal_metric,
    bnc_posterior_stats,
    mcmc_posterior,
    optimal_metric,
    pnc_identity_gmi,
    pnc_identity_gmi_high_snr_limit,
    pnc_identity_theta_star,
    pnc_linear_gmi,
    psi,
    quadrature_posterior,
    score,
    solve_delta_eps,
    truncate_spectrum,
    whiten_stats,
)
