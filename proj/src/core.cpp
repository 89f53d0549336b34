#include "vecgnndr/core.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace vecgnndr {

double psi(double q, double power) {
    if (!(q > 0.0) || !(power > 0.0))
        throw std::domain_error("psi: q and P must be positive");
    if (q >= power) return 0.0;
    const double r = std::log(power / q) - 1.0 + q / power;
    return r > 0.0 ? r : 0.0;
}

double solve_delta_eps(double lambda1, double power, double eps) {
    if (!(lambda1 > 0.0) || !(power > 0.0) || !(eps > 0.0))
        throw std::domain_error("solve_delta_eps: inputs must be positive");
    if (lambda1 < power) return 0.0;

    // r(delta) = log(1 + P*delta) - delta*lambda1 + eps is strictly
    // decreasing for lambda1 >= P with r(0) = eps > 0, so a sign change
    // brackets the unique root.
    const auto resid = [&](double d) {
        return std::log1p(power * d) - d * lambda1 + eps;
    };
    double hi = std::max(1.0, 2.0 * eps * (lambda1 - power + 1.0) / power);
    int grow = 0;
    while (resid(hi) > 0.0) {
        hi *= 2.0;
        if (++grow > 200)
            throw std::runtime_error("solve_delta_eps: bracket growth failed");
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double r = resid(mid);
        if (std::abs(r) <= 1e-12) return mid;
        (r > 0.0 ? lo : hi) = mid;
    }
    const double d = 0.5 * (lo + hi);
    if (std::abs(resid(d)) > 1e-12)
        throw std::runtime_error("solve_delta_eps: bisection did not reach residual 1e-12");
    return d;
}

VectorXd clamp_psd_eigenvalues(const VectorXd& eigvals, double trace) {
    const double floor_neg = -1e-10 * trace;
    const double clamp_to = 1e-14 * trace;
    VectorXd out = eigvals;
    for (int i = 0; i < out.size(); ++i) {
        if (out[i] < 0.0) {
            if (out[i] < floor_neg)
                throw std::runtime_error(
                    "covariance has an eigenvalue below the numerical PSD floor");
            out[i] = clamp_to;
        }
    }
    return out;
}

void validate_posterior_stats(const PosteriorStats& stats, double power,
                              bool check_trace_bound) {
    const auto& s = stats.sigma;
    if (s.rows() != s.cols() || s.rows() != stats.mu.size())
        throw std::invalid_argument("posterior stats dimensions are inconsistent");
    const double scale = s.norm();
    if ((s - s.adjoint()).norm() > 1e-12 * std::max(scale, 1e-300))
        throw std::runtime_error("conditional covariance is not Hermitian");
    const double tr = s.real().trace();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(s, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed");
    if (es.eigenvalues().minCoeff() < -1e-10 * tr)
        throw std::runtime_error("conditional covariance is not numerically PSD");
    const int bx = stats.dim();
    if (check_trace_bound && tr > bx * power * (1.0 + 1e-9))
        throw std::runtime_error("conditional covariance trace exceeds B_x * P");
}

TruncatedSpectrum truncate_spectrum(const MatrixXcd& sigma, double power,
                                    double eps) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sigma);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed");

    const int n = static_cast<int>(sigma.rows());
    TruncatedSpectrum out;
    out.eigvals.resize(n);
    out.eigvecs.resize(n, n);
    // Eigen returns ascending order; flip to descending.
    for (int i = 0; i < n; ++i) {
        out.eigvals[i] = es.eigenvalues()[n - 1 - i];
        out.eigvecs.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    out.eigvals = clamp_psd_eigenvalues(out.eigvals, sigma.real().trace());

    out.delta_eps = out.eigvals[0] >= power
                        ? solve_delta_eps(out.eigvals[0], power, eps)
                        : 0.0;
    const double truncated_level = power / (power + out.delta_eps);
    out.trunc_eigvals.resize(n);
    for (int i = 0; i < n; ++i)
        out.trunc_eigvals[i] =
            out.eigvals[i] < power ? out.eigvals[i] : truncated_level;
    return out;
}

}  // namespace vecgnndr
