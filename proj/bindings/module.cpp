#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vecgnndr/channels.hpp"
#include "vecgnndr/codebook.hpp"
#include "vecgnndr/core.hpp"
#include "vecgnndr/decoder.hpp"
#include "vecgnndr/gmi.hpp"
#include "vecgnndr/mcmc.hpp"
#include "vecgnndr/restricted.hpp"
#include "vecgnndr/rng.hpp"

namespace py = pybind11;
using namespace vecgnndr;

namespace {

py::dict gmi_to_dict(const GmiEstimate& g) {
    py::dict d;
    d["value"] = g.value;
    d["std_err"] = g.std_err;
    d["n_samples"] = g.n_samples;
    d["degenerate"] = g.degenerate;
    return d;
}

}  // namespace

PYBIND11_MODULE(_vecgnndr, m) {
    m.doc() = "GMI-optimal vectorized nearest-neighbor decoding metrics for "
              "in-block-memory channels";

    m.def("psi", &psi, py::arg("q"), py::arg("power"),
          "Per-direction rate contribution log(P/q) - 1 + q/P, clamped at P.");
    m.def("solve_delta_eps", &solve_delta_eps, py::arg("lambda1"),
          py::arg("power"), py::arg("eps"));

    m.def(
        "truncate_spectrum",
        [](const MatrixXcd& sigma, double power, double eps) {
            const TruncatedSpectrum ts = truncate_spectrum(sigma, power, eps);
            return py::make_tuple(ts.eigvals, ts.eigvecs, ts.trunc_eigvals,
                                  ts.delta_eps);
        },
        py::arg("sigma"), py::arg("power"), py::arg("eps") = kDefaultEps,
        "Descending eigensystem plus truncated eigenvalues; returns "
        "(eigvals, eigvecs, trunc_eigvals, delta_eps).");

    m.def(
        "optimal_metric",
        [](const VectorXcd& mu, const MatrixXcd& sigma, double power,
           double eps) {
            const MetricFactors mf = optimal_metric({mu, sigma}, power, eps);
            return py::make_tuple(mf.g, mf.f);
        },
        py::arg("mu"), py::arg("sigma"), py::arg("power"),
        py::arg("eps") = kDefaultEps,
        "Synthesized (g, f) pair of the GMI-optimal decoding metric.");

    // Block noncoherent AWGN channel.
    m.def(
        "bnc_posterior_stats",
        [](const VectorXcd& y, double power, double sigma2) {
            const BlockNoncoherentParams p{static_cast<int>(y.size()), power,
                                           sigma2};
            const PosteriorStats st = bnc_posterior_stats(y, p);
            return py::make_tuple(st.mu, st.sigma);
        },
        py::arg("y"), py::arg("power"), py::arg("sigma2"));
    m.def(
        "bnc_optimal_gmi",
        [](int bx, double power, double sigma2) {
            return bnc_optimal_gmi({bx, power, sigma2}).value;
        },
        py::arg("bx"), py::arg("power"), py::arg("sigma2"));
    m.def(
        "bnc_elementwise_gmi",
        [](double power, double sigma2) {
            return bnc_elementwise_gmi({1, power, sigma2}).value;
        },
        py::arg("power"), py::arg("sigma2"));
    m.def(
        "bnc_optimal_metric",
        [](const VectorXcd& y, double power, double sigma2, double eps) {
            const BlockNoncoherentParams p{static_cast<int>(y.size()), power,
                                           sigma2};
            const MetricFactors mf = bnc_optimal_metric(y, p, eps);
            return py::make_tuple(mf.g, mf.f);
        },
        py::arg("y"), py::arg("power"), py::arg("sigma2"),
        py::arg("eps") = kDefaultEps);
    m.def(
        "bnc_optimal_gmi_mc",
        [](int bx, double power, double sigma2, std::int64_t n, std::uint64_t seed,
           int threads) {
            const BlockNoncoherentParams p{bx, power, sigma2};
            return gmi_to_dict(optimal_gmi(bnc_stats_sampler(p), power, n, seed,
                                           threads));
        },
        py::arg("bx"), py::arg("power"), py::arg("sigma2"),
        py::arg("n_samples") = 100000, py::arg("seed") = 0,
        py::arg("threads") = 0,
        "Monte Carlo route to the optimal GMI (cross-check of the quadrature "
        "closed form).");

    // Phase noise channel.
    m.def(
        "pnc_linear_gmi",
        [](int bx, double power, double sigma2, double c) {
            const PncLinearResult r = pnc_linear_gmi({bx, power, sigma2, c});
            return py::make_tuple(r.gmi.value, r.gamma, r.pi);
        },
        py::arg("bx"), py::arg("power"), py::arg("sigma2"), py::arg("c"));
    m.def(
        "pnc_identity_gmi",
        [](int bx, double power, double sigma2, double c) {
            return pnc_identity_gmi({bx, power, sigma2, c}).value;
        },
        py::arg("bx"), py::arg("power"), py::arg("sigma2"), py::arg("c"));
    m.def(
        "pnc_identity_theta_star",
        [](int bx, double power, double sigma2, double c) {
            return pnc_identity_theta_star({bx, power, sigma2, c});
        },
        py::arg("bx"), py::arg("power"), py::arg("sigma2"), py::arg("c"));
    m.def(
        "pnc_identity_gmi_high_snr_limit",
        [](int bx, double c) {
            return pnc_identity_gmi_high_snr_limit({bx, 1.0, 1.0, c});
        },
        py::arg("bx"), py::arg("c"));

    m.def(
        "mcmc_posterior",
        [](const VectorXcd& y, double power, double sigma2, double c,
           int n_iters, int burn_in, double step, int n_chains,
           std::uint64_t seed, bool adapt_step) {
            const PhaseNoiseParams p{static_cast<int>(y.size()), power, sigma2,
                                     c};
            McmcConfig cfg;
            cfg.n_iters = n_iters;
            cfg.burn_in = burn_in;
            cfg.step = step;
            cfg.n_chains = n_chains;
            cfg.seed = seed;
            cfg.adapt_step = adapt_step;
            const auto [st, diag] = mcmc_posterior(y, p, cfg);
            py::dict d;
            d["mu"] = st.mu;
            d["sigma"] = st.sigma;
            d["acceptance_rate"] = diag.acceptance_rate;
            d["split_spread"] = diag.split_spread;
            return d;
        },
        py::arg("y"), py::arg("power"), py::arg("sigma2"), py::arg("c"),
        py::arg("n_iters") = 10000, py::arg("burn_in") = 2000,
        py::arg("step") = 0.1, py::arg("n_chains") = 4, py::arg("seed") = 0,
        py::arg("adapt_step") = true,
        "Gibbs-with-Metropolis posterior statistics for the phase noise "
        "channel.");
    m.def(
        "quadrature_posterior",
        [](const VectorXcd& y, double power, double sigma2, double c) {
            const PhaseNoiseParams p{static_cast<int>(y.size()), power, sigma2,
                                     c};
            const PosteriorStats st = quadrature_posterior(y, p);
            return py::make_tuple(st.mu, st.sigma);
        },
        py::arg("y"), py::arg("power"), py::arg("sigma2"), py::arg("c"));

    // ACGNC.
    m.def(
        "acgnc_optimal_gmi",
        [](const MatrixXcd& a, const MatrixXcd& sigma_noise, double power) {
            return acgnc_optimal({a, sigma_noise, power}).gmi.value;
        },
        py::arg("a"), py::arg("sigma_noise"), py::arg("power"));

    // Codebook design.
    m.def(
        "whiten_stats",
        [](const VectorXcd& mu_color, const MatrixXcd& sigma_color,
           const MatrixXcd& sigma) {
            const PosteriorStats st = whiten_stats(mu_color, sigma_color, sigma);
            return py::make_tuple(st.mu, st.sigma);
        },
        py::arg("mu_color"), py::arg("sigma_color"), py::arg("sigma"));
    m.def("score", &score, py::arg("x"), py::arg("lambdas"),
          py::arg("power") = 1.0);

    // Decoder simulation on the block noncoherent channel.
    m.def(
        "bnc_block_error_rate",
        [](int bx, double power, double sigma2, double rate, int l,
           std::int64_t trials, std::uint64_t seed, int threads) {
            const BlockNoncoherentParams p{bx, power, sigma2};
            const TransmitChannel chan = [p](const VectorXcd& x, Rng& rng) {
                const double theta = rng.uniform(0.0, 2.0 * M_PI);
                const cplx rot(std::cos(theta), std::sin(theta));
                return Observation{rot * x + rng.cnormal_vec(p.b_x, p.sigma2),
                                   0};
            };
            const MetricProvider metric = [p](const Observation& obs) {
                return bnc_optimal_metric(obs.y, p, kDefaultEps);
            };
            const ErrorRateResult r = block_error_rate(
                chan, metric, rate, l, bx, power, trials, seed, threads);
            py::dict d;
            d["error_rate"] = r.error_rate;
            d["ci"] = r.wilson_halfwidth;
            d["m"] = r.m;
            d["effective_rate"] = r.effective_rate;
            return d;
        },
        py::arg("bx"), py::arg("power"), py::arg("sigma2"), py::arg("rate"),
        py::arg("l"), py::arg("trials") = 1000, py::arg("seed") = 0,
        py::arg("threads") = 0);
}
