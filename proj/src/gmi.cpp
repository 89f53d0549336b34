#include "vecgnndr/gmi.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "vecgnndr/core.hpp"
#include "vecgnndr/stats.hpp"

namespace vecgnndr {

void metric_sample_terms(const MetricFactors& m, const VectorXcd& x,
                         MetricTermsBatch& batch, std::int64_t row) {
    const int bx = batch.block_len();
    const int r = static_cast<int>(m.f.rows());
    if (r > bx)
        throw std::invalid_argument("scaling matrix has more rows than B_x");
    if (m.g.size() != r)
        throw std::invalid_argument("g length does not match rows of f");

    batch.dist_sq[row] = (m.g - m.f * x).squaredNorm();
    batch.g_abs_sq.row(row).setZero();
    batch.sigma_sq.row(row).setZero();
    if (r == 0) return;

    Eigen::JacobiSVD<MatrixXcd> svd(m.f, Eigen::ComputeThinU);
    const VectorXcd gt = svd.matrixU().adjoint() * m.g;
    const auto& sv = svd.singularValues();
    for (int i = 0; i < sv.size(); ++i) {
        batch.g_abs_sq(row, i) = std::norm(gt[i]);
        batch.sigma_sq(row, i) = sv[i] * sv[i];
    }
    // Any components of U^H g beyond the singular-value count belong to
    // directions with sigma = 0 and cancel exactly in the objective.
    for (int i = static_cast<int>(sv.size()); i < r && i < bx; ++i)
        batch.g_abs_sq(row, i) = std::norm(gt[i]);
}

double gmi_objective(const MetricTermsBatch& terms, double theta,
                     double power) {
    const std::int64_t n = terms.size();
    const int bx = terms.block_len();
    double acc = 0.0, comp = 0.0;
    for (std::int64_t s = 0; s < n; ++s) {
        double t = theta * terms.dist_sq[s];
        for (int i = 0; i < bx; ++i) {
            const double den = 1.0 - theta * power * terms.sigma_sq(s, i);
            t -= theta * terms.g_abs_sq(s, i) / den;
            t += std::log(den);
        }
        // Kahan-compensated accumulation keeps the reduction reproducible.
        const double y = t - comp;
        const double snew = acc + y;
        comp = (snew - acc) - y;
        acc = snew;
    }
    return acc / (static_cast<double>(n) * bx);
}

namespace {

// Golden-section maximization of a concave function on [a, b].
template <class F>
double golden_max(const F& f, double a, double b, double xtol) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

ThetaOpt maximize_theta(const MetricTermsBatch& terms, double power) {
    if (terms.size() == 0)
        throw std::invalid_argument("maximize_theta: empty sample set");
    const auto f = [&](double th) { return gmi_objective(terms, th, power); };

    double theta_max = 1.0;
    double theta_star = -0.5;
    bool bracketed = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
        const double lo = -theta_max;
        theta_star = golden_max(f, lo, -1e-13, std::max(1e-11, 1e-12 * theta_max));
        if (theta_star > lo + 0.01 * theta_max) {
            bracketed = true;
            break;
        }
        theta_max *= 2.0;  // maximizer pinned at the lower boundary
    }
    if (!bracketed)
        throw std::runtime_error(
            "maximize_theta: maximizer stayed at the lower boundary after 60 "
            "bracket doublings");

    // One local quadratic-fit polish around the golden-section estimate.
    const double h = std::max(1e-7 * std::abs(theta_star), 1e-11);
    const double x2 = std::min(theta_star + h, -1e-16);
    const double f0 = f(theta_star - h), f1 = f(theta_star), f2 = f(x2);
    const double denom = f0 - 2.0 * f1 + f2;
    if (denom < 0.0) {
        const double cand = theta_star + 0.5 * h * (f0 - f2) / denom;
        if (cand < 0.0 && std::abs(cand - theta_star) <= h && f(cand) >= f1)
            theta_star = cand;
    }

    ThetaOpt out;
    out.theta_star = theta_star;
    out.value = f(theta_star);
    if (out.value <= 1e-12) {
        // The supremum is approached at theta -> 0^- where the objective
        // vanishes: nothing better than zero rate is available.
        out.degenerate = true;
        out.value = std::max(out.value, 0.0);
    }
    return out;
}

MetricTermsBatch collect_metric_terms(const FixedMetricGmiInput& input) {
    if (input.n_samples < 100)
        throw std::invalid_argument("gmi_fixed_metric: n_samples must be >= 100");
    MetricTermsBatch batch;
    batch.dist_sq.resize(input.n_samples);
    batch.g_abs_sq.resize(input.n_samples, input.block_len);
    batch.sigma_sq.resize(input.n_samples, input.block_len);

    const BlockPlan plan = plan_blocks(input.n_samples);
    parallel_blocks(
        plan.n_blocks, input.seed,
        [&](std::int64_t b) {
            Rng rng = derive_stream(input.seed, static_cast<std::uint64_t>(b));
            for (std::int64_t s = plan.begin(b); s < plan.end(b); ++s) {
                const JointDraw d = input.joint_sampler(rng);
                const MetricFactors m = input.metric(d.obs);
                metric_sample_terms(m, d.x, batch, s);
            }
        },
        input.threads);

    if (!batch.dist_sq.allFinite() || !batch.g_abs_sq.allFinite() ||
        !batch.sigma_sq.allFinite())
        throw std::runtime_error("gmi_fixed_metric: non-finite sampled term");
    return batch;
}

GmiEstimate gmi_fixed_metric(const FixedMetricGmiInput& input) {
    const MetricTermsBatch batch = collect_metric_terms(input);

    double theta;
    bool degenerate = false;
    if (input.fixed_theta) {
        theta = *input.fixed_theta;
        if (!(theta < 0.0))
            throw std::invalid_argument("gmi_fixed_metric: theta must be negative");
    } else {
        const ThetaOpt opt = maximize_theta(batch, input.power);
        theta = opt.theta_star;
        degenerate = opt.degenerate;
    }

    // Per-sample contribution at the chosen theta; the objective is
    // stationary at theta*, so theta-estimation noise is second order.
    StreamingMoments mom;
    const int bx = batch.block_len();
    for (std::int64_t s = 0; s < batch.size(); ++s) {
        double t = theta * batch.dist_sq[s];
        for (int i = 0; i < bx; ++i) {
            const double den = 1.0 - theta * input.power * batch.sigma_sq(s, i);
            t -= theta * batch.g_abs_sq(s, i) / den;
            t += std::log(den);
        }
        mom.add(t / bx);
    }

    GmiEstimate est;
    est.n_samples = batch.size();
    est.std_err = mom.std_err_of_mean();
    est.degenerate = degenerate;
    est.value = degenerate ? 0.0 : mom.mean;
    return est;
}

MetricFactors optimal_metric(const PosteriorStats& stats, double power,
                             double eps) {
    // The trace bound B_x * P holds for the expected conditional covariance,
    // not per observation (large-norm outputs exceed it), so it is not
    // enforced here.
    validate_posterior_stats(stats, power, /*check_trace_bound=*/false);
    const TruncatedSpectrum ts = truncate_spectrum(stats.sigma, power, eps);
    const int bx = stats.dim();
    VectorXd gdiag(bx), fdiag(bx);
    for (int i = 0; i < bx; ++i) {
        const double li = ts.trunc_eigvals[i];
        if (!(li > 0.0) || !(li < power))
            throw std::runtime_error(
                "optimal_metric: truncated eigenvalue outside (0, P)");
        gdiag[i] = std::sqrt(power / ((power - li) * li));
        fdiag[i] = std::sqrt((power - li) / (power * li));
    }
    MetricFactors m;
    const MatrixXcd wh = ts.eigvecs.adjoint();
    m.g = gdiag.asDiagonal() * (wh * stats.mu);
    m.f = fdiag.asDiagonal() * wh;
    return m;
}

GmiIntegrandPair optimal_gmi_integrand(const PosteriorStats& stats,
                                       double power) {
    const int bx = stats.dim();
    const TruncatedSpectrum ts =
        truncate_spectrum(stats.sigma, power, kDefaultEps);
    const double mu_sq = stats.mu.squaredNorm();

    double eig_route = mu_sq / power;
    for (int i = 0; i < bx; ++i) eig_route += psi(ts.eigvals[i], power);
    eig_route /= bx;

    // Log-det route through a Cholesky factorization, with the law-of-total-
    // variance terms kept per sample and the above-power part removed.
    Eigen::LDLT<MatrixXcd> ldlt(stats.sigma);
    double logdet = 0.0;
    bool ldlt_ok = ldlt.info() == Eigen::Success;
    if (ldlt_ok) {
        const VectorXd d = ldlt.vectorD().real();
        if ((d.array() > 0.0).all())
            logdet = d.array().log().sum();
        else
            ldlt_ok = false;
    }
    if (!ldlt_ok)
        logdet = ts.eigvals.array().log().sum();

    double over_power = 0.0;
    for (int i = 0; i < bx; ++i) {
        const double li = ts.eigvals[i];
        if (li >= power)
            over_power += std::log(power / li) + li / power - 1.0;
    }
    const double trace = stats.sigma.real().trace();
    const double logdet_route =
        (bx * std::log(power) - logdet + trace / power + mu_sq / power -
         bx - over_power) /
        bx;
    return {eig_route, logdet_route};
}

namespace {

GmiEstimate mc_over_stats(const StatsSampler& stats_sampler, double power,
                          std::int64_t n_samples, std::uint64_t seed,
                          int threads, bool closed_form_route) {
    if (n_samples < 100)
        throw std::invalid_argument("optimal_gmi: n_samples must be >= 100");
    const BlockPlan plan = plan_blocks(n_samples);
    std::vector<StreamingMoments> partial(plan.n_blocks);

    parallel_blocks(
        plan.n_blocks, seed,
        [&](std::int64_t b) {
            Rng rng = derive_stream(seed, static_cast<std::uint64_t>(b));
            for (std::int64_t s = plan.begin(b); s < plan.end(b); ++s) {
                const PosteriorStats st = stats_sampler(rng);
                if (closed_form_route) {
                    const TruncatedSpectrum ts =
                        truncate_spectrum(st.sigma, power, kDefaultEps);
                    if (ts.eigvals[0] >= power)
                        throw std::runtime_error(
                            "optimal_gmi_closed: sample " + std::to_string(s) +
                            " violates the eigenvalues-below-P assumption "
                            "(lambda_1 = " + std::to_string(ts.eigvals[0]) + ")");
                    const int bx = st.dim();
                    const double v =
                        (bx * std::log(power) -
                         ts.eigvals.array().log().sum()) / bx;
                    partial[b].add(v);
                } else {
                    const GmiIntegrandPair p = optimal_gmi_integrand(st, power);
                    if (std::abs(p.eig_route - p.logdet_route) >
                        1e-10 * std::max(1.0, std::abs(p.eig_route)))
                        throw std::runtime_error(
                            "optimal_gmi: integrand routes disagree at sample " +
                            std::to_string(s));
                    partial[b].add(p.eig_route);
                }
            }
        },
        threads);

    StreamingMoments mom;
    for (const auto& pm : partial) mom.merge(pm);
    GmiEstimate est;
    est.value = mom.mean;
    est.std_err = mom.std_err_of_mean();
    est.n_samples = mom.count;
    return est;
}

}  // namespace

GmiEstimate optimal_gmi(const StatsSampler& stats_sampler, double power,
                        std::int64_t n_samples, std::uint64_t seed,
                        int threads) {
    return mc_over_stats(stats_sampler, power, n_samples, seed, threads, false);
}

GmiEstimate optimal_gmi_closed(const StatsSampler& stats_sampler, double power,
                               std::int64_t n_samples, std::uint64_t seed,
                               int threads) {
    return mc_over_stats(stats_sampler, power, n_samples, seed, threads, true);
}

double conditional_objective_at_unit_theta(const PosteriorStats& stats,
                                           const MetricFactors& m,
                                           double power) {
    const int bx = stats.dim();
    // E_{X|y,v} ||g - fX||^2 = ||g - f mu||^2 + tr(f Sigma f^H).
    const double cond_dist = (m.g - m.f * stats.mu).squaredNorm() +
                             (m.f * stats.sigma * m.f.adjoint()).real().trace();

    double t = -cond_dist;
    const int r = static_cast<int>(m.f.rows());
    if (r > 0) {
        Eigen::JacobiSVD<MatrixXcd> svd(m.f, Eigen::ComputeThinU);
        const VectorXcd gt = svd.matrixU().adjoint() * m.g;
        for (int i = 0; i < svd.singularValues().size(); ++i) {
            const double s2 = svd.singularValues()[i] * svd.singularValues()[i];
            const double den = 1.0 + power * s2;
            t += std::norm(gt[i]) / den + std::log(den);
        }
    }
    return t / bx;
}

}  // namespace vecgnndr
