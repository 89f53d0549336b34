#ifndef VECGNNDR_CORE_HPP
#define VECGNNDR_CORE_HPP

#include "vecgnndr/types.hpp"

namespace vecgnndr {

// Per-eigendirection rate contribution: log(P/q) - 1 + q/P for q in (0, P),
// zero at or above P. Convex on (0, inf) and C^1 at q = P.
double psi(double q, double power);

// Unique delta > 0 solving log(1 + P*delta) - delta*lambda1 = -eps when
// lambda1 >= P; zero when lambda1 < P. Residual at the returned root is at
// most 1e-12 in absolute value.
double solve_delta_eps(double lambda1, double power, double eps);

// Clamps slightly negative eigenvalues of a numerically PSD matrix.
// Eigenvalues in [-1e-10 * trace, 0) become 1e-14 * trace; anything more
// negative is rejected.
VectorXd clamp_psd_eigenvalues(const VectorXd& eigvals, double trace);

// Checks Hermitian symmetry (1e-12 relative) and numerical positive
// semidefiniteness; optionally the trace bound trace(sigma) <= B_x * P.
void validate_posterior_stats(const PosteriorStats& stats, double power,
                              bool check_trace_bound = true);

// Descending eigendecomposition of a Hermitian PSD matrix plus the
// truncated eigenvalues at power level P and truncation parameter eps.
TruncatedSpectrum truncate_spectrum(const MatrixXcd& sigma, double power,
                                    double eps);

// Default truncation parameter in nats; the GMI loss it induces is bounded
// by this value, far below Monte Carlo noise at desk-scale sample counts.
inline constexpr double kDefaultEps = 1e-6;

}  // namespace vecgnndr

#endif
