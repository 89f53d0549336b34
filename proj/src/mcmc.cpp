#include "vecgnndr/mcmc.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "vecgnndr/rng.hpp"

namespace vecgnndr {

namespace {

double log_likelihood(const VectorXcd& y, const VectorXcd& x,
                      const VectorXd& phi, double sigma2) {
    double acc = 0.0;
    for (int i = 0; i < y.size(); ++i) {
        const cplx rot(std::cos(phi[i]), std::sin(phi[i]));
        acc -= std::norm(y[i] - rot * x[i]) / sigma2;
    }
    return acc;
}

VectorXd increments_to_phases(const VectorXd& z, double c) {
    VectorXd phi(z.size());
    double acc = 0.0;
    for (int i = 0; i < z.size(); ++i) {
        acc += c * z[i];
        phi[i] = acc;
    }
    return phi;
}

}  // namespace

ChainResult mcmc_run_chain(const VectorXcd& y, const PhaseNoiseParams& params,
                           const McmcConfig& config, std::uint64_t chain_seed,
                           bool use_likelihood) {
    const int bx = params.b_x;
    if (y.size() != bx) throw std::invalid_argument("mcmc: y length mismatch");
    if (config.burn_in >= config.n_iters)
        throw std::invalid_argument("mcmc: burn_in must be below n_iters");

    Rng rng(chain_seed);
    const double post_var = params.power * params.sigma2 /
                            (params.power + params.sigma2);
    const double gain = params.power / (params.power + params.sigma2);

    VectorXd z = VectorXd::Zero(bx);
    VectorXd phi = VectorXd::Zero(bx);
    VectorXcd x = gain * y;

    double step = config.step;
    std::int64_t accepted = 0, proposed = 0;
    ChainResult out;
    out.x_draws.reserve(config.n_iters - config.burn_in);
    out.z_draws.reserve(config.n_iters - config.burn_in);

    for (int t = 1; t <= config.n_iters; ++t) {
        // Step A: componentwise conditional Gaussian draw of x given phi.
        for (int i = 0; i < bx; ++i) {
            const cplx rot(std::cos(phi[i]), -std::sin(phi[i]));
            x[i] = gain * rot * y[i] + rng.cnormal(post_var);
        }

        // Step B: random-walk Metropolis on the increments.
        VectorXd z_prop(bx);
        for (int i = 0; i < bx; ++i) z_prop[i] = z[i] + step * rng.normal();
        const VectorXd phi_prop = increments_to_phases(z_prop, params.c);

        const double log_cur =
            (use_likelihood ? log_likelihood(y, x, phi, params.sigma2) : 0.0) -
            0.5 * z.squaredNorm();
        const double log_prop =
            (use_likelihood ? log_likelihood(y, x, phi_prop, params.sigma2)
                            : 0.0) -
            0.5 * z_prop.squaredNorm();

        const bool accept = std::log(std::max(rng.uniform(), 1e-300)) <
                            log_prop - log_cur;
        if (accept) {
            z = z_prop;
            phi = phi_prop;
        }
        if (t > config.burn_in) {
            ++proposed;
            accepted += accept ? 1 : 0;
            out.x_draws.push_back(x);
            out.z_draws.push_back(z);
        } else if (config.adapt_step) {
            // Robbins-Monro drift toward 0.3 acceptance, frozen at burn-in.
            const double gamma = 1.0 / std::pow(static_cast<double>(t), 0.6);
            step *= std::exp(gamma * ((accept ? 1.0 : 0.0) - 0.3));
            step = std::min(std::max(step, 1e-6), 1e3);
        }
    }
    out.acceptance_rate =
        static_cast<double>(accepted) / static_cast<double>(proposed);
    out.tuned_step = step;
    return out;
}

std::pair<PosteriorStats, McmcDiagnostics> mcmc_posterior(
    const VectorXcd& y, const PhaseNoiseParams& params,
    const McmcConfig& config) {
    if (config.n_chains < 1)
        throw std::invalid_argument("mcmc: n_chains must be >= 1");
    const int bx = params.b_x;

    VectorXcd sum = VectorXcd::Zero(bx);
    MatrixXcd sum_outer = MatrixXcd::Zero(bx, bx);
    std::int64_t n_total = 0;
    double acc_rate = 0.0, tuned = 0.0;
    McmcDiagnostics diag;

    for (int c = 0; c < config.n_chains; ++c) {
        const ChainResult chain = mcmc_run_chain(
            y, params, config, mix_seed(config.seed, static_cast<std::uint64_t>(c)));
        VectorXcd chain_sum = VectorXcd::Zero(bx);
        for (const auto& xs : chain.x_draws) {
            chain_sum += xs;
            sum_outer += xs * xs.adjoint();
        }
        sum += chain_sum;
        n_total += static_cast<std::int64_t>(chain.x_draws.size());
        diag.per_chain_means.push_back(
            chain_sum / static_cast<double>(chain.x_draws.size()));
        acc_rate += chain.acceptance_rate;
        tuned += chain.tuned_step;
    }

    const double n = static_cast<double>(n_total);
    PosteriorStats st;
    st.mu = sum / n;
    // 1/N_eff normalization, matching the estimator as stated.
    st.sigma = sum_outer / n - st.mu * st.mu.adjoint();
    st.sigma = 0.5 * (st.sigma + st.sigma.adjoint().eval());

    diag.acceptance_rate = acc_rate / config.n_chains;
    diag.tuned_step = tuned / config.n_chains;
    for (std::size_t i = 0; i < diag.per_chain_means.size(); ++i)
        for (std::size_t j = i + 1; j < diag.per_chain_means.size(); ++j)
            diag.split_spread = std::max(
                diag.split_spread,
                (diag.per_chain_means[i] - diag.per_chain_means[j]).norm());

    if (diag.acceptance_rate < 0.05 || diag.acceptance_rate > 0.95)
        throw std::runtime_error(
            "mcmc: post-burn-in acceptance rate " +
            std::to_string(diag.acceptance_rate) +
            " is outside [0.05, 0.95]; the proposal step is badly tuned");
    return {st, diag};
}

namespace {

// Gauss-Hermite nodes/weights for the standard normal measure via the
// Golub-Welsch tridiagonal eigenproblem.
void gauss_hermite_normal(int n, VectorXd& nodes, VectorXd& weights) {
    MatrixXd j = MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = std::sqrt(static_cast<double>(k));
        j(k - 1, k) = b;
        j(k, k - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(j);
    nodes = es.eigenvalues();
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double v0 = es.eigenvectors()(0, i);
        weights[i] = v0 * v0;  // total mass 1 for the normal measure
    }
}

struct QuadResult {
    VectorXcd mu;
    MatrixXcd sigma;
};

QuadResult quadrature_pass(const VectorXcd& y, const PhaseNoiseParams& p,
                           int n_nodes) {
    const int bx = p.b_x;
    VectorXd nodes, weights;
    gauss_hermite_normal(n_nodes, nodes, weights);

    const double gain = p.power / (p.power + p.sigma2);
    const double log_like_const = -y.squaredNorm() / (p.power + p.sigma2) -
                                  bx * std::log(M_PI * (p.power + p.sigma2));

    VectorXcd mu_acc = VectorXcd::Zero(bx);
    MatrixXcd outer_acc = MatrixXcd::Zero(bx, bx);
    double w_acc = 0.0;

    std::vector<int> idx(bx, 0);
    VectorXd z(bx);
    for (;;) {
        double w = 1.0;
        for (int i = 0; i < bx; ++i) {
            z[i] = nodes[idx[i]];
            w *= weights[idx[i]];
        }
        // Likelihood of y given the phases, with the input integrated out;
        // it enters the weight even though it is flat in the phases here.
        w *= std::exp(log_like_const);

        const VectorXd phi = increments_to_phases(z, p.c);
        VectorXcd m(bx);
        for (int i = 0; i < bx; ++i) {
            const cplx rot(std::cos(phi[i]), -std::sin(phi[i]));
            m[i] = gain * rot * y[i];
        }
        mu_acc += w * m;
        outer_acc += w * (m * m.adjoint());
        w_acc += w;

        int d = 0;
        while (d < bx && ++idx[d] == n_nodes) idx[d++] = 0;
        if (d == bx) break;
    }

    QuadResult out;
    out.mu = mu_acc / w_acc;
    const double cond_var = p.power * p.sigma2 / (p.power + p.sigma2);
    out.sigma = outer_acc / w_acc - out.mu * out.mu.adjoint() +
                cond_var * MatrixXcd::Identity(bx, bx);
    return out;
}

}  // namespace

PosteriorStats quadrature_posterior(const VectorXcd& y,
                                    const PhaseNoiseParams& params) {
    if (params.b_x > 3)
        throw std::invalid_argument(
            "quadrature_posterior: grid budget limits B_x to 3");
    if (y.size() != params.b_x)
        throw std::invalid_argument("quadrature_posterior: y length mismatch");

    const int ladder[] = {24, 40, 64, 96};
    QuadResult prev = quadrature_pass(y, params, ladder[0]);
    for (std::size_t k = 1; k < sizeof(ladder) / sizeof(ladder[0]); ++k) {
        const QuadResult cur = quadrature_pass(y, params, ladder[k]);
        const double dmu = (cur.mu - prev.mu).cwiseAbs().maxCoeff();
        const double dsig = (cur.sigma - prev.sigma).cwiseAbs().maxCoeff();
        if (dmu < 1e-8 && dsig < 1e-8) {
            PosteriorStats st;
            st.mu = cur.mu;
            st.sigma = 0.5 * (cur.sigma + cur.sigma.adjoint().eval());
            return st;
        }
        prev = cur;
    }
    throw std::runtime_error("quadrature_posterior: grid ladder did not settle");
}

}  // namespace vecgnndr
