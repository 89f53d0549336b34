#include <cmath>

#include "doctest.h"
#include "vecgnndr/core.hpp"
#include "vecgnndr/rng.hpp"

using namespace vecgnndr;

TEST_CASE("psi evaluates the clamped rate function") {
    CHECK(psi(1.0, 1.0) == 0.0);
    CHECK(psi(0.5, 1.0) == doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-12));
    CHECK(psi(2.0, 1.0) == 0.0);
    CHECK_THROWS_AS(psi(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(psi(1.0, -1.0), std::domain_error);
}

TEST_CASE("psi is convex and C1 at the power level") {
    Rng rng(11);
    const double p = 1.7;
    for (int trial = 0; trial < 2000; ++trial) {
        const double a = rng.uniform(1e-3, 3.0 * p);
        const double b = rng.uniform(1e-3, 3.0 * p);
        const double t = rng.uniform();
        const double mid = psi(t * a + (1.0 - t) * b, p);
        CHECK(mid <= t * psi(a, p) + (1.0 - t) * psi(b, p) + 1e-12);
    }
    // One-sided slopes at q = P agree (both zero).
    const double h = 1e-7;
    CHECK(std::abs((psi(p, p) - psi(p - h, p)) / h) < 1e-6);
    CHECK(std::abs((psi(p + h, p) - psi(p, p)) / h) < 1e-6);
}

TEST_CASE("solve_delta_eps matches frozen bisection values") {
    CHECK(solve_delta_eps(0.5, 1.0, 1e-3) == 0.0);
    CHECK(solve_delta_eps(2.0, 1.0, 0.01) ==
          doctest::Approx(0.00995081663150429).epsilon(1e-9));
    CHECK(solve_delta_eps(1.0, 1.0, 5e-5) ==
          doctest::Approx(0.010033361074095488).epsilon(1e-9));
    CHECK_THROWS_AS(solve_delta_eps(1.0, 1.0, -1.0), std::domain_error);
}

TEST_CASE("solve_delta_eps root satisfies the defining equation") {
    Rng rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        const double p = rng.uniform(0.1, 5.0);
        const double lam = p * rng.uniform(1.0, 20.0);
        const double eps = std::pow(10.0, rng.uniform(-9.0, -1.0));
        const double d = solve_delta_eps(lam, p, eps);
        CHECK(d > 0.0);
        CHECK(std::abs(std::log1p(p * d) - d * lam + eps) <= 1e-12);
    }
}

namespace {

MatrixXcd random_hermitian_psd(int n, Rng& rng, double scale) {
    MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.cnormal(1.0);
    return scale * (a * a.adjoint()) / n;
}

MatrixXcd random_unitary(int n, Rng& rng) {
    MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.cnormal(1.0);
    Eigen::HouseholderQR<MatrixXcd> qr(a);
    return qr.householderQ();
}

}  // namespace

TEST_CASE("truncate_spectrum: all eigenvalues below the power level") {
    const MatrixXcd sigma = 0.5 * MatrixXcd::Identity(2, 2);
    const TruncatedSpectrum ts = truncate_spectrum(sigma, 1.0, 1e-6);
    CHECK(ts.eigvals[0] == doctest::Approx(0.5));
    CHECK(ts.eigvals[1] == doctest::Approx(0.5));
    CHECK(ts.delta_eps == 0.0);
    CHECK((ts.trunc_eigvals - ts.eigvals).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("truncate_spectrum: eigenvalue above P is truncated") {
    MatrixXcd sigma = MatrixXcd::Zero(2, 2);
    sigma(0, 0) = 2.0;
    sigma(1, 1) = 0.5;
    const TruncatedSpectrum ts = truncate_spectrum(sigma, 1.0, 0.01);
    const double delta = 0.00995081663150429;
    CHECK(ts.delta_eps == doctest::Approx(delta).epsilon(1e-9));
    CHECK(ts.trunc_eigvals[0] == doctest::Approx(1.0 / (1.0 + delta)).epsilon(1e-9));
    CHECK(ts.trunc_eigvals[1] == doctest::Approx(0.5));
}

TEST_CASE("truncate_spectrum: block noncoherent covariance at y=(1,0)") {
    // Sigma(y) = P s^2/(P+s^2) I + (P/(P+s^2))^2 y y^H with P = s^2 = 1.
    VectorXcd y(2);
    y << 1.0, 0.0;
    const MatrixXcd sigma =
        0.5 * MatrixXcd::Identity(2, 2) + 0.25 * y * y.adjoint();
    const TruncatedSpectrum ts = truncate_spectrum(sigma, 1.0, 1e-6);
    CHECK(ts.eigvals[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(ts.eigvals[1] == doctest::Approx(0.5).epsilon(1e-12));
    // Leading eigenvector aligns with y/||y||.
    const double align = std::abs(ts.eigvecs.col(0).dot(y.normalized()));
    CHECK(align == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("truncate_spectrum diagonalization and ordering invariants") {
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform() * 5);
        const MatrixXcd sigma = random_hermitian_psd(n, rng, 2.0);
        const TruncatedSpectrum ts = truncate_spectrum(sigma, 1.0, 1e-6);
        for (int i = 1; i < n; ++i) CHECK(ts.eigvals[i - 1] >= ts.eigvals[i]);
        const MatrixXcd d =
            ts.eigvecs.adjoint() * sigma * ts.eigvecs -
            MatrixXcd(ts.eigvals.cast<cplx>().asDiagonal());
        CHECK(d.norm() <= 1e-10 * std::max(1.0, sigma.norm()));
        CHECK((ts.eigvecs * ts.eigvecs.adjoint() - MatrixXcd::Identity(n, n))
                  .norm() < 1e-12);
        CHECK(ts.delta_eps == (ts.eigvals[0] < 1.0 ? 0.0 : ts.delta_eps));
        if (ts.eigvals[0] >= 1.0) CHECK(ts.delta_eps > 0.0);
    }
}

TEST_CASE("spectral majorization: psi sums dominated by eigenvalue sums") {
    Rng rng(7);
    const double p = 1.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform() * 3);
        const MatrixXcd a = random_hermitian_psd(n, rng, rng.uniform(0.2, 3.0));
        const MatrixXcd w = random_unitary(n, rng);
        const TruncatedSpectrum ts = truncate_spectrum(a, p, 1e-6);
        double lhs = 0.0, rhs = 0.0;
        for (int i = 0; i < n; ++i) {
            const double q = (w.col(i).adjoint() * a * w.col(i))(0).real();
            lhs += psi(std::max(q, 1e-300), p);
            rhs += psi(std::max(ts.eigvals[i], 1e-300), p);
        }
        CHECK(lhs <= rhs + 1e-10);
    }
}

TEST_CASE("PSD clamping accepts tiny negatives and rejects real ones") {
    VectorXd evs(3);
    evs << 1.0, 0.5, -1e-12;
    const VectorXd c = clamp_psd_eigenvalues(evs, 1.5);
    CHECK(c[2] == doctest::Approx(1.5e-14));
    evs[2] = -1.0;
    CHECK_THROWS(clamp_psd_eigenvalues(evs, 1.5));
}

TEST_CASE("posterior stats validation") {
    PosteriorStats st;
    st.mu = VectorXcd::Zero(2);
    st.sigma = 0.5 * MatrixXcd::Identity(2, 2);
    CHECK_NOTHROW(validate_posterior_stats(st, 1.0));
    st.sigma(0, 1) = cplx(0.3, 0.0);
    st.sigma(1, 0) = cplx(0.1, 0.0);  // not Hermitian
    CHECK_THROWS(validate_posterior_stats(st, 1.0));
    st.sigma = 5.0 * MatrixXcd::Identity(2, 2);  // trace above B_x * P
    CHECK_THROWS(validate_posterior_stats(st, 1.0));
}
