// Acceptance suite: one function per criterion, each printing a single
// PASS/FAIL line. Run with no arguments for the full suite or with a
// criterion number (1-11) for a single entry.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "vecgnndr/channels.hpp"
#include "vecgnndr/codebook.hpp"
#include "vecgnndr/core.hpp"
#include "vecgnndr/decoder.hpp"
#include "vecgnndr/gmi.hpp"
#include "vecgnndr/mcmc.hpp"
#include "vecgnndr/restricted.hpp"
#include "vecgnndr/rng.hpp"
#include "vecgnndr/stats.hpp"

using namespace vecgnndr;

namespace {

struct Criterion {
    int id;
    std::string label;
    std::function<bool(std::string&)> fn;
};

MatrixXcd random_complex_matrix(int r, int c, Rng& rng) {
    MatrixXcd m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = rng.cnormal(1.0);
    return m;
}

// --------------------------------------------------------------------------
// 1. ACGNC exactness: synthesized-metric GMI equals the closed form to 1e-9
//    and its decode decisions match explicit ML on 1000 trials per instance.
// --------------------------------------------------------------------------
bool criterion1(std::string& detail) {
    Rng rng(1001);
    for (int inst = 0; inst < 50; ++inst) {
        const int bx = 1 + static_cast<int>(rng.uniform() * 4);
        const MatrixXcd a = random_complex_matrix(bx, bx, rng);
        const MatrixXcd b = random_complex_matrix(bx, bx, rng);
        const AcgncParams p{
            a, (b * b.adjoint() + 0.1 * MatrixXcd::Identity(bx, bx)).eval(),
            rng.uniform(0.5, 2.0)};

        // GMI of the synthesized metric through the eigenvalue formula; the
        // observation-dependent ||mu||^2 term averages exactly to
        // B_x P - tr Sigma by the orthogonality principle.
        const PosteriorStats st =
            acgnc_posterior_stats(VectorXcd::Zero(bx), p);
        double via_psi = (bx * p.power - st.sigma.real().trace()) / p.power;
        const TruncatedSpectrum ts =
            truncate_spectrum(st.sigma, p.power, kDefaultEps);
        for (int i = 0; i < bx; ++i) via_psi += psi(ts.eigvals[i], p.power);
        via_psi /= bx;

        const AcgncOptimal opt = acgnc_optimal(p);
        if (std::abs(via_psi - opt.gmi.value) > 1e-9) {
            detail = "GMI routes differ by " +
                     std::to_string(std::abs(via_psi - opt.gmi.value)) +
                     " at instance " + std::to_string(inst);
            return false;
        }

        // Decode match against the explicit ML metric.
        const MetricProvider ml = acgnc_ml_metric(p);
        const int m = 32, l = 3;
        const Codebook cb = generate_codebook(m, l, bx, p.power,
                                              MatrixXcd::Identity(bx, bx), rng);
        for (int trial = 0; trial < 1000; ++trial) {
            const int sent = static_cast<int>(rng.uniform() * m);
            std::vector<Observation> rx(l);
            for (int bl = 0; bl < l; ++bl) {
                const VectorXcd x = cb.blocks[bl].row(sent).transpose();
                rx[bl] = {acgnc_sample_y(p, x, rng), 0};
            }
            if (decode(opt.metric, cb, rx) != decode(ml, cb, rx)) {
                detail = "decode mismatch at instance " + std::to_string(inst);
                return false;
            }
        }
    }
    return true;
}

// --------------------------------------------------------------------------
// 2. Element-wise saturation at 40 dB.
// --------------------------------------------------------------------------
bool criterion2(std::string& detail) {
    const double limit = 0.4287201581256110;  // gamma - 1/e + E1(1)
    const double v =
        bnc_elementwise_gmi({1, 1.0, snr_db_to_sigma2(40.0)}).value;
    detail = "value " + std::to_string(v) + " vs " + std::to_string(limit);
    return std::abs(v - limit) <= 1e-3;
}

// --------------------------------------------------------------------------
// 3. Optimal-vs-element-wise curve family over the SNR grid.
// --------------------------------------------------------------------------
bool criterion3(std::string& detail) {
    const std::vector<int> bxs = {2, 5, 10};
    std::vector<double> snrs;
    for (double s = -5.0; s <= 30.0 + 1e-9; s += 5.0) snrs.push_back(s);

    std::vector<std::vector<double>> opt(bxs.size()), elem_gap(bxs.size());
    std::vector<double> elem;
    for (double snr : snrs)
        elem.push_back(
            bnc_elementwise_gmi({1, 1.0, snr_db_to_sigma2(snr)}).value);

    for (std::size_t bi = 0; bi < bxs.size(); ++bi) {
        for (std::size_t si = 0; si < snrs.size(); ++si) {
            const double s2 = snr_db_to_sigma2(snrs[si]);
            const double v = bnc_optimal_gmi({bxs[bi], 1.0, s2}).value;
            const double bound = (bxs[bi] - 1.0) / bxs[bi] *
                                 (std::log(1.0 + 1.0 / s2) - 1.0 / (1.0 + s2));
            if (v < bound - 1e-12) {
                detail = "lower bound violated at B_x=" + std::to_string(bxs[bi]) +
                         " snr=" + std::to_string(snrs[si]);
                return false;
            }
            if (si > 0 && v <= opt[bi].back()) {
                detail = "not monotone in SNR at B_x=" + std::to_string(bxs[bi]);
                return false;
            }
            if (v < elem[si] - 1e-12) {
                detail = "optimal fell below element-wise";
                return false;
            }
            opt[bi].push_back(v);
            elem_gap[bi].push_back(v - elem[si]);
        }
        for (std::size_t si = 1; si < snrs.size(); ++si)
            if (elem_gap[bi][si] <= elem_gap[bi][si - 1]) {
                detail = "gap to element-wise not widening in SNR";
                return false;
            }
    }
    for (std::size_t bi = 1; bi < bxs.size(); ++bi)
        for (std::size_t si = 0; si < snrs.size(); ++si)
            if (elem_gap[bi][si] <= elem_gap[bi - 1][si]) {
                detail = "gap to element-wise not widening in B_x";
                return false;
            }
    return true;
}

// --------------------------------------------------------------------------
// 4. Large-block limit with the convergent squeeze bound.
// --------------------------------------------------------------------------
bool criterion4(std::string& detail) {
    const double s2 = snr_db_to_sigma2(10.0);
    const double v = bnc_optimal_gmi({100, 1.0, s2}).value;
    const double limit = std::log(1.0 + 1.0 / s2) - 1.0 / (1.0 + s2);
    const double tol =
        (std::log(1.0 + 1.0 / s2) + 1.0 / (1.0 + s2)) / 100.0;
    detail = "deviation " + std::to_string(std::abs(v - limit)) +
             " allowed " + std::to_string(tol);
    return std::abs(v - limit) <= tol;
}

// --------------------------------------------------------------------------
// 5. Generic evaluator on the synthesized metric vs the quadrature form.
// --------------------------------------------------------------------------
bool criterion5(std::string& detail) {
    for (double snr : {0.0, 10.0}) {
        const BlockNoncoherentParams p{2, 1.0, snr_db_to_sigma2(snr)};
        FixedMetricGmiInput in;
        in.joint_sampler = bnc_joint_sampler(p);
        in.metric = [p](const Observation& obs) {
            return optimal_metric(bnc_posterior_stats(obs.y, p), p.power,
                                  kDefaultEps);
        };
        in.power = p.power;
        in.n_samples = 100000;
        in.block_len = p.b_x;
        in.seed = 505 + static_cast<std::uint64_t>(snr);
        in.fixed_theta = -1.0;
        const GmiEstimate est = gmi_fixed_metric(in);
        const double closed = bnc_optimal_gmi(p).value;
        detail += "snr " + std::to_string(snr) + ": mc " +
                  std::to_string(est.value) + " closed " +
                  std::to_string(closed) + " se " +
                  std::to_string(est.std_err) + "; ";
        if (std::abs(est.value - closed) > 3.0 * est.std_err) return false;
    }
    return true;
}

// --------------------------------------------------------------------------
// 6. Linear variant against the phase-noise closed form.
// --------------------------------------------------------------------------
bool criterion6(std::string& detail) {
    for (int bx : {2, 5}) {
        for (double c : {0.1, 0.5}) {
            const PhaseNoiseParams p{bx, 1.0, snr_db_to_sigma2(10.0), c};
            const double closed = pnc_linear_gmi(p).gmi.value;

            CorrelationPair corr;
            corr.xy = MatrixXcd::Zero(bx, bx);
            for (int i = 0; i < bx; ++i)
                corr.xy(i, i) = p.power * std::exp(-0.5 * c * c * (i + 1));
            corr.yy = (p.power + p.sigma2) * MatrixXcd::Identity(bx, bx);
            const double analytic =
                linear_variant([&](int) { return corr; }, {1.0}, p.power)
                    .gmi.value;
            if (std::abs(analytic - closed) > 1e-9) {
                detail = "analytic correlations off by " +
                         std::to_string(std::abs(analytic - closed));
                return false;
            }

            const RestrictedVariantResult sampled = linear_variant_sampled(
                pnc_joint_sampler(p), p.power, 100000,
                606 + bx * 10 + static_cast<std::uint64_t>(c * 10));
            if (std::abs(sampled.gmi.value - closed) >
                3.0 * sampled.gmi.std_err) {
                detail = "sampled correlations: " +
                         std::to_string(sampled.gmi.value) + " vs " +
                         std::to_string(closed) + " se " +
                         std::to_string(sampled.gmi.std_err);
                return false;
            }
        }
    }
    return true;
}

// --------------------------------------------------------------------------
// 7. Identity-rule closed form vs direct maximization; high-SNR limit.
// --------------------------------------------------------------------------
bool criterion7(std::string& detail) {
    for (int bx : {2, 5}) {
        for (double c : {0.1, 0.5}) {
            for (double snr : {0.0, 10.0, 20.0}) {
                const PhaseNoiseParams p{bx, 1.0, snr_db_to_sigma2(snr), c};
                // Independent grid-plus-refinement maximization of h.
                double best_t = -1.0, best_v = -1e300;
                for (int k = 0; k <= 20000; ++k) {
                    const double t =
                        -std::pow(10.0, -6.0 + 9.0 * k / 20000.0);
                    const double v = pnc_identity_objective(p, t);
                    if (v > best_v) {
                        best_v = v;
                        best_t = t;
                    }
                }
                double lo = best_t * std::pow(10.0, 9.0 / 20000.0);
                double hi = best_t / std::pow(10.0, 9.0 / 20000.0);
                for (int it = 0; it < 200; ++it) {
                    const double m1 = lo + (hi - lo) * 0.381966;
                    const double m2 = hi - (hi - lo) * 0.381966;
                    if (pnc_identity_objective(p, m1) >
                        pnc_identity_objective(p, m2))
                        hi = m2;
                    else
                        lo = m1;
                }
                const double grid_t = 0.5 * (lo + hi);
                const double grid_v = pnc_identity_objective(p, grid_t);
                const double closed_t = pnc_identity_theta_star(p);
                const double closed_v = pnc_identity_gmi(p).value;
                if (std::abs(grid_v - closed_v) > 1e-6 ||
                    std::abs(grid_t - closed_t) > 1e-6 * std::abs(closed_t)) {
                    detail = "grid maximization disagrees at B_x=" +
                             std::to_string(bx) + " c=" + std::to_string(c) +
                             " snr=" + std::to_string(snr);
                    return false;
                }
            }
            const PhaseNoiseParams p60{bx, 1.0, snr_db_to_sigma2(60.0), c};
            if (std::abs(pnc_identity_gmi(p60).value -
                         pnc_identity_gmi_high_snr_limit(p60)) > 1e-3) {
                detail = "60 dB value is not within 1e-3 of the limit";
                return false;
            }
        }
    }
    return true;
}

// --------------------------------------------------------------------------
// 8. MCMC fidelity against the quadrature oracle. The per-entry deviations
//    are pooled (averaged) across the 20 observations of each configuration,
//    probing estimator bias at a noise floor far below the tolerance.
// --------------------------------------------------------------------------
bool criterion8(std::string& detail) {
    const std::uint64_t master = 808;
    for (int bx : {1, 2}) {
        for (double c : {0.5, 1.0}) {
            const PhaseNoiseParams p{bx, 1.0, 1.0, c};  // SNR = 0 dB
            Rng rng = derive_stream(master, bx * 10 + static_cast<int>(c * 10));
            VectorXcd mu_pool = VectorXcd::Zero(bx);
            MatrixXcd sig_pool = MatrixXcd::Zero(bx, bx);
            for (int i = 0; i < 20; ++i) {
                const VectorXcd y = pnc_sample(p, rng).y;
                McmcConfig cfg;
                cfg.seed = mix_seed(master, 1000 + i + bx * 100 +
                                               static_cast<int>(c * 10) * 10000);
                const auto [st, diag] = mcmc_posterior(y, p, cfg);
                const PosteriorStats oracle = quadrature_posterior(y, p);
                mu_pool += st.mu - oracle.mu;
                sig_pool += st.sigma - oracle.sigma;
                if (diag.acceptance_rate < 0.1 || diag.acceptance_rate > 0.6) {
                    detail = "acceptance rate " +
                             std::to_string(diag.acceptance_rate) +
                             " outside [0.1, 0.6]";
                    return false;
                }
            }
            mu_pool /= 20.0;
            sig_pool /= 20.0;
            const double dmu = mu_pool.cwiseAbs().maxCoeff();
            const double dsig = sig_pool.cwiseAbs().maxCoeff();
            detail += "Bx=" + std::to_string(bx) + " c=" + std::to_string(c) +
                      ": pooled |dmu| " + std::to_string(dmu) +
                      ", pooled |dSigma| " + std::to_string(dsig) + "; ";
            if (dmu > 0.02 * std::sqrt(p.power) || dsig > 0.05 * p.power)
                return false;
        }
    }
    return true;
}

// --------------------------------------------------------------------------
// 9. Restricted-variant ordering chain with MCMC-estimated statistics.
// --------------------------------------------------------------------------
bool criterion9(std::string& detail) {
    const std::int64_t n_obs = 2000;
    for (double snr : {0.0, 10.0, 20.0}) {
        const PhaseNoiseParams p{2, 1.0, snr_db_to_sigma2(snr), 0.1};
        const auto sampler = [p](Rng& rng) {
            const VectorXcd y = pnc_sample(p, rng).y;
            McmcConfig cfg;
            cfg.seed = rng.raw();
            return mcmc_posterior(y, p, cfg).first;
        };

        OrderingInputs in;
        in.opt = optimal_gmi(sampler, p.power, n_obs, 901);
        in.cssf = cssf(sampler, p.power, n_obs, 902).gmi;
        in.cmsf = cmsf(sampler, p.power, n_obs, 903).gmi;
        // The channel exposes no CSI, so the CSI-dependent variants coincide
        // with their constant counterparts.
        in.csi_ssf = in.cssf;
        in.csi_msf = in.cmsf;
        in.lin = pnc_linear_gmi(p).gmi;
        const GmiEstimate id = pnc_identity_gmi(p);

        const OrderingReport rep = ordering_check(in);
        for (const auto& c : rep.checks) {
            if (!c.pass) {
                detail = "snr " + std::to_string(snr) + ": " + c.name +
                         " slack " + std::to_string(c.slack) + " tol " +
                         std::to_string(c.tol);
                return false;
            }
        }
        if (snr == 20.0) {
            // Qualitative high-SNR ranking: the optimal rule dominates the
            // restricted ones, and all of them beat the identity rule.
            const auto above_id = [&](const GmiEstimate& g) {
                return g.value >= id.value - 3.0 * g.std_err;
            };
            const auto opt_above = [&](const GmiEstimate& g) {
                return in.opt.value >=
                       g.value - 3.0 * std::hypot(in.opt.std_err, g.std_err);
            };
            if (!opt_above(in.cmsf) || !opt_above(in.lin) ||
                !opt_above(in.cssf) || !above_id(in.cmsf) ||
                !above_id(in.lin) || !above_id(in.cssf)) {
                detail = "high-SNR qualitative ranking failed";
                return false;
            }
        }
    }
    return true;
}

// --------------------------------------------------------------------------
// 10. Operational achievability: error rate falls with codeword length at
//     half the optimal GMI.
// --------------------------------------------------------------------------
bool criterion10(std::string& detail) {
    const BlockNoncoherentParams p{2, 1.0, snr_db_to_sigma2(10.0)};
    const double rate = 0.5 * bnc_optimal_gmi(p).value;
    const TransmitChannel chan = [p](const VectorXcd& x, Rng& rng) {
        const double theta = rng.uniform(0.0, 2.0 * M_PI);
        const cplx rot(std::cos(theta), std::sin(theta));
        return Observation{rot * x + rng.cnormal_vec(p.b_x, p.sigma2), 0};
    };
    const MetricProvider metric = [p](const Observation& obs) {
        return bnc_optimal_metric(obs.y, p, kDefaultEps);
    };

    std::vector<ErrorRateResult> results;
    for (int l : {10, 50, 200}) {
        results.push_back(block_error_rate(chan, metric, rate, l, p.b_x,
                                           p.power, 10000,
                                           1010 + static_cast<std::uint64_t>(l)));
        detail += "L=" + std::to_string(l) + ": " +
                  std::to_string(results.back().error_rate) + " +- " +
                  std::to_string(results.back().wilson_halfwidth) + "; ";
    }
    int inversions = 0;
    for (std::size_t i = 1; i < results.size(); ++i) {
        if (results[i].error_rate >= results[i - 1].error_rate) {
            ++inversions;
            // An inversion must stay within the confidence intervals.
            if (results[i].error_rate - results[i - 1].error_rate >
                results[i].wilson_halfwidth + results[i - 1].wilson_halfwidth)
                return false;
        }
    }
    return inversions <= 1;
}

// --------------------------------------------------------------------------
// 11. Property suites.
// --------------------------------------------------------------------------
bool criterion11(std::string& detail) {
    Rng rng(1111);
    const double power = 1.0;

    // psi convexity.
    for (int t = 0; t < 1000; ++t) {
        const double a = rng.uniform(1e-3, 3.0);
        const double b = rng.uniform(1e-3, 3.0);
        const double s = rng.uniform();
        if (psi(s * a + (1 - s) * b, power) >
            s * psi(a, power) + (1 - s) * psi(b, power) + 1e-12) {
            detail = "psi convexity failed";
            return false;
        }
    }

    // Spectral majorization on 1000 random instances.
    for (int t = 0; t < 1000; ++t) {
        const int n = 2 + static_cast<int>(rng.uniform() * 3);
        const MatrixXcd g = random_complex_matrix(n, n, rng);
        const MatrixXcd a =
            rng.uniform(0.2, 3.0) * (g * g.adjoint()) / n;
        Eigen::HouseholderQR<MatrixXcd> qr(random_complex_matrix(n, n, rng));
        const MatrixXcd w = qr.householderQ();
        const TruncatedSpectrum ts = truncate_spectrum(a, power, kDefaultEps);
        double lhs = 0.0, rhs = 0.0;
        for (int i = 0; i < n; ++i) {
            lhs += psi(std::max((w.col(i).adjoint() * a * w.col(i))(0).real(),
                                1e-300),
                       power);
            rhs += psi(std::max(ts.eigvals[i], 1e-300), power);
        }
        if (lhs > rhs + 1e-10) {
            detail = "spectral majorization failed";
            return false;
        }
    }

    // Per-sample truncation loss and the two integrand routes.
    for (int t = 0; t < 500; ++t) {
        const int n = 2 + static_cast<int>(rng.uniform() * 3);
        const MatrixXcd g = random_complex_matrix(n, n, rng);
        PosteriorStats st;
        st.sigma = rng.uniform(0.4, 2.5) * (g * g.adjoint()) / n;
        const double tr = st.sigma.real().trace();
        if (tr > 0.9 * n * power) st.sigma *= 0.9 * n * power / tr;
        st.mu = std::sqrt((n * power - st.sigma.real().trace()) / (2.0 * n)) *
                rng.cnormal_vec(n, 1.0);

        const GmiIntegrandPair pair = optimal_gmi_integrand(st, power);
        if (std::abs(pair.eig_route - pair.logdet_route) >
            1e-10 * std::max(1.0, std::abs(pair.eig_route))) {
            detail = "integrand routes disagree";
            return false;
        }
        const double eps = 1e-4;
        const MetricFactors mf = optimal_metric(st, power, eps);
        const double cond = conditional_objective_at_unit_theta(st, mf, power);
        if (cond < pair.eig_route - eps - 1e-12) {
            detail = "truncation loss exceeded eps";
            return false;
        }
    }

    // Argmin invariance under joint positive rescaling.
    {
        const BlockNoncoherentParams p{2, 1.0, 0.5};
        const Codebook cb = generate_codebook(
            64, 5, 2, 1.0, MatrixXcd::Identity(2, 2), rng);
        const MetricProvider base = [p](const Observation& obs) {
            return bnc_optimal_metric(obs.y, p, kDefaultEps);
        };
        const MetricProvider scaled = [base](const Observation& obs) {
            MetricFactors mf = base(obs);
            mf.g *= 7.3;
            mf.f *= 7.3;
            return mf;
        };
        for (int t = 0; t < 100; ++t) {
            std::vector<Observation> rx(5);
            for (int bl = 0; bl < 5; ++bl) rx[bl] = {bnc_sample(p, rng).y, 0};
            if (decode(base, cb, rx) != decode(scaled, cb, rx)) {
                detail = "argmin scaling invariance failed";
                return false;
            }
        }
    }

    // Orthogonality identity on the block noncoherent channel.
    {
        const BlockNoncoherentParams p{3, 1.0, 0.6};
        StreamingMoments mom;
        for (int t = 0; t < 50000; ++t) {
            const PosteriorStats st =
                bnc_posterior_stats(bnc_sample(p, rng).y, p);
            mom.add(st.mu.squaredNorm() + st.sigma.real().trace());
        }
        if (std::abs(mom.mean - p.b_x * p.power) >
            3.0 * mom.std_err_of_mean()) {
            detail = "orthogonality identity failed";
            return false;
        }
    }

    // Fixed-point trace preservation.
    {
        MatrixXcd a = MatrixXcd::Zero(2, 2);
        a(0, 0) = 1.4;
        a(1, 1) = 0.7;
        const ColoredChannel ch = make_acgnc_colored_channel(
            {a, 0.4 * MatrixXcd::Identity(2, 2), 1.0});
        VectorXd lam = VectorXd::Ones(2);
        for (int it = 0; it < 3; ++it) {
            lam = fixed_point_step(ch, lam, 20000,
                                   1100 + static_cast<std::uint64_t>(it));
            if (std::abs(lam.sum() - 2.0) > 1e-10 || lam.minCoeff() <= 0.0) {
                detail = "fixed-point trace preservation failed";
                return false;
            }
        }
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "ACGNC exactness and ML decode match", criterion1},
        {2, "element-wise saturation constant", criterion2},
        {3, "optimal vs element-wise curve family", criterion3},
        {4, "large-block limit", criterion4},
        {5, "generic evaluator vs closed form", criterion5},
        {6, "phase-noise linear variant", criterion6},
        {7, "identity-rule closed form", criterion7},
        {8, "MCMC fidelity vs quadrature oracle", criterion8},
        {9, "restricted-variant ordering chain", criterion9},
        {10, "operational achievability trend", criterion10},
        {11, "property suites", criterion11},
    };

    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    bool all_pass = true;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = false;
        try {
            pass = c.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        std::printf("criterion %2d [%s]: %s (%.1f s)%s%s\n", c.id,
                    c.label.c_str(), pass ? "PASS" : "FAIL", secs,
                    detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && pass;
    }
    return all_pass ? 0 : 1;
}
