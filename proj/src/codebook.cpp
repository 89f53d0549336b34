#include "vecgnndr/codebook.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "vecgnndr/core.hpp"
#include "vecgnndr/stats.hpp"

namespace vecgnndr {

PosteriorStats whiten_stats(const VectorXcd& mu_color,
                            const MatrixXcd& sigma_color,
                            const MatrixXcd& sigma) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sigma);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("whiten_stats: eigendecomposition failed");
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("whiten_stats: Sigma must be positive definite");
    const MatrixXcd inv_half = es.operatorInverseSqrt();
    PosteriorStats st;
    st.mu = inv_half * mu_color;
    st.sigma = inv_half * sigma_color * inv_half;
    st.sigma = 0.5 * (st.sigma + st.sigma.adjoint().eval());
    return st;
}

VectorXd score(const VectorXcd& x, const VectorXd& lambdas, double power) {
    if (x.size() != lambdas.size())
        throw std::invalid_argument("score: dimension mismatch");
    VectorXd s(x.size());
    for (int i = 0; i < x.size(); ++i) {
        if (!(lambdas[i] > 0.0))
            throw std::domain_error("score: lambdas must be positive");
        s[i] = std::norm(x[i]) / (power * lambdas[i] * lambdas[i]) -
               1.0 / lambdas[i];
    }
    return s;
}

double cb_G(double x, double power) {
    if (!(x > 0.0)) throw std::domain_error("cb_G: argument must be positive");
    return x < power ? -std::log(x / power) : 1.0 - x / power;
}

double cb_G_prime(double x, double power) {
    if (!(x > 0.0)) throw std::domain_error("cb_G_prime: argument must be positive");
    return x < power ? -1.0 / x : -1.0 / power;
}

namespace {

struct WhitenedEig {
    VectorXd eigvals;
    MatrixXcd w;
    double tr_g = 0.0;          // tr G(Sigma_hat)
    MatrixXcd g_prime;          // G'(Sigma_hat)
    VectorXd pos_part_diag;     // diag((Sigma_hat - P I)_+)
};

WhitenedEig analyze_whitened(const MatrixXcd& sigma_hat, double power) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sigma_hat);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("codebook: eigendecomposition failed");
    WhitenedEig out;
    out.eigvals = clamp_psd_eigenvalues(es.eigenvalues(),
                                        sigma_hat.real().trace());
    out.w = es.eigenvectors();
    const int n = static_cast<int>(out.eigvals.size());
    VectorXd gp(n), pos(n);
    for (int i = 0; i < n; ++i) {
        out.tr_g += cb_G(out.eigvals[i], power);
        gp[i] = cb_G_prime(out.eigvals[i], power);
        pos[i] = std::max(out.eigvals[i] - power, 0.0);
    }
    out.g_prime = out.w * gp.asDiagonal() * out.w.adjoint();
    const MatrixXcd pos_mat = out.w * pos.asDiagonal() * out.w.adjoint();
    out.pos_part_diag = pos_mat.diagonal().real();
    return out;
}

VectorXcd whiten_vec(const VectorXcd& v, const VectorXd& lambdas) {
    VectorXcd out(v.size());
    for (int i = 0; i < v.size(); ++i) out[i] = v[i] / std::sqrt(lambdas[i]);
    return out;
}

MatrixXcd whiten_mat(const MatrixXcd& m, const VectorXd& lambdas) {
    MatrixXcd out = m;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            out(i, j) /= std::sqrt(lambdas[i] * lambdas[j]);
    return out;
}

}  // namespace

ColoredChannel make_acgnc_colored_channel(const AcgncParams& p) {
    const int bx = static_cast<int>(p.a.cols());
    const MatrixXcd sinv = p.sigma_noise.inverse();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> esn(p.sigma_noise);
    if (esn.info() != Eigen::Success || esn.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("colored acgnc: Sigma_noise must be PD");
    const MatrixXcd noise_half = esn.operatorSqrt();
    const MatrixXcd a = p.a;
    const double power = p.power;

    const auto posterior_pair = [a, sinv, power, bx](const VectorXd& lambdas) {
        MatrixXcd prior_prec = MatrixXcd::Zero(bx, bx);
        for (int i = 0; i < bx; ++i)
            prior_prec(i, i) = 1.0 / (power * lambdas[i]);
        const MatrixXcd prec = a.adjoint() * sinv * a + prior_prec;
        MatrixXcd cov = prec.inverse();
        cov = 0.5 * (cov + cov.adjoint().eval());
        return cov;
    };

    ColoredChannel ch;
    ch.b_x = bx;
    ch.power = power;
    ch.sample_obs = [a, noise_half, power, bx](const VectorXd& lambdas,
                                               Rng& rng) {
        VectorXcd x(bx);
        for (int i = 0; i < bx; ++i) x[i] = rng.cnormal(power * lambdas[i]);
        const VectorXcd y =
            a * x + noise_half * rng.cnormal_vec(static_cast<int>(a.rows()), 1.0);
        return Observation{y, 0};
    };
    ch.posterior = [a, sinv, posterior_pair](const Observation& obs,
                                             const VectorXd& lambdas) {
        PosteriorStats st;
        st.sigma = posterior_pair(lambdas);
        st.mu = st.sigma * (a.adjoint() * (sinv * obs.y));
        return st;
    };
    ch.make_posterior_draw = [a, sinv, posterior_pair,
                              bx](const Observation& obs,
                                  const VectorXd& lambdas) {
        const MatrixXcd cov = posterior_pair(lambdas);
        const VectorXcd mu = cov * (a.adjoint() * (sinv * obs.y));
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(cov);
        const MatrixXcd half = es.operatorSqrt();
        return [mu, half, bx](Rng& rng) {
            return (mu + half * rng.cnormal_vec(bx, 1.0)).eval();
        };
    };
    return ch;
}

namespace {

// Per-observation contributions shared by delta_i and fixed_point_step.
struct SampleContrib {
    VectorXd delta;     // one entry per component
    VectorXd pos_diag;  // diag((Sigma_hat - P I)_+)
};

SampleContrib sample_contrib(const ColoredChannel& ch, const VectorXd& lambdas,
                             std::int64_t n_inner, Rng& rng) {
    const Observation obs = ch.sample_obs(lambdas, rng);
    const PosteriorStats colored = ch.posterior(obs, lambdas);
    const VectorXcd mu_hat = whiten_vec(colored.mu, lambdas);
    const MatrixXcd sigma_hat = whiten_mat(colored.sigma, lambdas);
    const WhitenedEig eig = analyze_whitened(sigma_hat, ch.power);

    const int bx = ch.b_x;
    const auto draw = ch.make_posterior_draw(obs, lambdas);
    MatrixXd scores(n_inner, bx);
    VectorXd q(n_inner);
    for (std::int64_t k = 0; k < n_inner; ++k) {
        const VectorXcd x = draw(rng);
        scores.row(k) = score(x, lambdas, ch.power);
        const VectorXcd centered = whiten_vec(x, lambdas) - mu_hat;
        q[k] = (centered.adjoint() * eig.g_prime * centered)(0).real();
    }
    const VectorXd score_mean = scores.colwise().mean();

    SampleContrib out;
    out.delta.resize(bx);
    for (int i = 0; i < bx; ++i) {
        // E[q * centered score] plus the conditional score mean coupled to
        // tr G: the two summands of the Delta_i integrand.
        double cov_qs = 0.0;
        for (std::int64_t k = 0; k < n_inner; ++k)
            cov_qs += q[k] * (scores(k, i) - score_mean[i]);
        cov_qs /= static_cast<double>(n_inner);
        out.delta[i] = cov_qs + eig.tr_g * score_mean[i];
    }
    out.pos_diag = eig.pos_part_diag;
    return out;
}

}  // namespace

DeltaEstimate delta_i(const ColoredChannel& ch, const VectorXd& lambdas, int i,
                      std::int64_t n_outer, std::int64_t n_inner,
                      std::uint64_t seed, int threads) {
    if (n_inner < 16)
        throw std::invalid_argument("delta_i: inner sample count too small");
    if (i < 0 || i >= ch.b_x) throw std::invalid_argument("delta_i: bad index");

    const BlockPlan plan = plan_blocks(n_outer);
    std::vector<StreamingMoments> parts(plan.n_blocks);
    parallel_blocks(
        plan.n_blocks, seed,
        [&](std::int64_t b) {
            Rng rng = derive_stream(seed, static_cast<std::uint64_t>(b));
            for (std::int64_t s = plan.begin(b); s < plan.end(b); ++s)
                parts[b].add(sample_contrib(ch, lambdas, n_inner, rng).delta[i]);
        },
        threads);

    StreamingMoments mom;
    for (const auto& p : parts) mom.merge(p);
    return {mom.mean, mom.std_err_of_mean()};
}

VectorXd allocate_power(const VectorXd& pos, const VectorXd& delta,
                        double power) {
    const int bx = static_cast<int>(pos.size());
    const auto trace_at = [&](double nu) {
        double t = 0.0;
        for (int i = 0; i < bx; ++i)
            t += (power + pos[i]) / (power * (nu - delta[i]));
        return t;
    };
    const double nu_floor = delta.maxCoeff();
    double lo = nu_floor + 1e-9, hi = nu_floor + 1e3;
    int widen = 0;
    while (trace_at(lo) < bx) {
        lo = nu_floor + (lo - nu_floor) / 8.0;
        if (++widen > 60)
            throw std::runtime_error("allocate_power: no feasible nu near the floor");
    }
    widen = 0;
    while (trace_at(hi) > bx) {
        hi = nu_floor + (hi - nu_floor) * 8.0;
        if (++widen > 60)
            throw std::runtime_error("allocate_power: no feasible nu in bracket");
    }
    double nu = 0.5 * (lo + hi);
    for (int it = 0; it < 500; ++it) {
        nu = 0.5 * (lo + hi);
        const double t = trace_at(nu);
        if (std::abs(t - bx) <= 1e-12) break;
        if (t >= bx)
            lo = nu;
        else
            hi = nu;
    }

    VectorXd out(bx);
    for (int i = 0; i < bx; ++i)
        out[i] = (power + pos[i]) / (power * (nu - delta[i]));
    return out;
}

VectorXd fixed_point_step(const ColoredChannel& ch, const VectorXd& lambdas,
                          std::int64_t n_samples, std::uint64_t seed,
                          int threads) {
    const int bx = ch.b_x;
    const auto n_outer =
        static_cast<std::int64_t>(std::sqrt(static_cast<double>(n_samples)));
    const std::int64_t n_inner = std::max<std::int64_t>(n_outer, 64);

    const BlockPlan plan = plan_blocks(n_outer);
    std::vector<VectorXd> delta_parts(plan.n_blocks, VectorXd::Zero(bx));
    std::vector<VectorXd> pos_parts(plan.n_blocks, VectorXd::Zero(bx));
    std::vector<std::int64_t> counts(plan.n_blocks, 0);

    parallel_blocks(
        plan.n_blocks, seed,
        [&](std::int64_t b) {
            Rng rng = derive_stream(seed, static_cast<std::uint64_t>(b));
            for (std::int64_t s = plan.begin(b); s < plan.end(b); ++s) {
                const SampleContrib c = sample_contrib(ch, lambdas, n_inner, rng);
                delta_parts[b] += c.delta;
                pos_parts[b] += c.pos_diag;
                ++counts[b];
            }
        },
        threads);

    VectorXd delta = VectorXd::Zero(bx), pos = VectorXd::Zero(bx);
    std::int64_t n = 0;
    for (std::size_t b = 0; b < delta_parts.size(); ++b) {
        delta += delta_parts[b];
        pos += pos_parts[b];
        n += counts[b];
    }
    delta /= static_cast<double>(n);
    pos /= static_cast<double>(n);
    return allocate_power(pos, delta, ch.power);
}

GmiEstimate codebook_objective(const ColoredChannel& ch,
                               const VectorXd& lambdas, std::int64_t n_samples,
                               std::uint64_t seed, int threads) {
    const BlockPlan plan = plan_blocks(n_samples);
    std::vector<StreamingMoments> parts(plan.n_blocks);
    parallel_blocks(
        plan.n_blocks, seed,
        [&](std::int64_t b) {
            Rng rng = derive_stream(seed, static_cast<std::uint64_t>(b));
            for (std::int64_t s = plan.begin(b); s < plan.end(b); ++s) {
                const Observation obs = ch.sample_obs(lambdas, rng);
                const PosteriorStats colored = ch.posterior(obs, lambdas);
                const MatrixXcd sigma_hat = whiten_mat(colored.sigma, lambdas);
                parts[b].add(analyze_whitened(sigma_hat, ch.power).tr_g);
            }
        },
        threads);
    StreamingMoments mom;
    for (const auto& p : parts) mom.merge(p);
    return {mom.mean, mom.std_err_of_mean(), mom.count, false};
}

FixedPointTrace fixed_point_iterate(const ColoredChannel& ch, VectorXd lambda0,
                                    int max_iters, double tol,
                                    std::int64_t n_samples, std::uint64_t seed,
                                    int threads, bool track_objective) {
    FixedPointTrace trace;
    trace.iterates.push_back(lambda0);
    if (track_objective)
        trace.objective.push_back(
            codebook_objective(ch, lambda0, n_samples, mix_seed(seed, 9001), threads)
                .value);
    VectorXd cur = lambda0;
    for (int it = 0; it < max_iters; ++it) {
        const VectorXd step =
            fixed_point_step(ch, cur, n_samples,
                             mix_seed(seed, static_cast<std::uint64_t>(it)), threads);
        const VectorXd next = 0.5 * step + 0.5 * cur;  // damped update
        const double change = (next - cur).cwiseAbs().maxCoeff();
        cur = next;
        trace.iterates.push_back(cur);
        if (track_objective)
            trace.objective.push_back(
                codebook_objective(ch, cur, n_samples,
                                   mix_seed(seed, 9002 + static_cast<std::uint64_t>(it)),
                                   threads)
                    .value);
        if (change < tol) {
            trace.converged = true;
            break;
        }
    }
    return trace;
}

}  // namespace vecgnndr
