#include "vecgnndr/restricted.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "vecgnndr/core.hpp"
#include "vecgnndr/rng.hpp"
#include "vecgnndr/stats.hpp"

namespace vecgnndr {

namespace {

constexpr double kDegenerateTol = 1e-12;

// Eigenvalue at or beyond P - tol carries no rate under a constant scaling.
bool is_dropped(double lambda, double power) {
    return lambda >= power - kDegenerateTol * power;
}

struct EigKept {
    VectorXd lambdas;    // descending
    MatrixXcd w;         // columns matching lambdas
    std::vector<int> kept;
    double gmi = 0.0;    // B_x^{-1} sum over kept of log(P/lambda)
};

EigKept eig_for_matrix_scaling(const MatrixXcd& sigma_bar, double power) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sigma_bar);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("expected-covariance eigendecomposition failed");
    const int bx = static_cast<int>(sigma_bar.rows());
    EigKept out;
    out.lambdas.resize(bx);
    out.w.resize(bx, bx);
    for (int i = 0; i < bx; ++i) {
        out.lambdas[i] = es.eigenvalues()[bx - 1 - i];
        out.w.col(i) = es.eigenvectors().col(bx - 1 - i);
    }
    out.lambdas = clamp_psd_eigenvalues(out.lambdas, sigma_bar.real().trace());
    double acc = 0.0;
    for (int i = 0; i < bx; ++i) {
        if (is_dropped(out.lambdas[i], power)) continue;
        out.kept.push_back(i);
        acc += std::log(power / out.lambdas[i]);
    }
    out.gmi = acc / bx;
    return out;
}

// Builds the matrix-scaling metric from kept eigenpairs: rows of Pi are
// sigma_i w_i^H with sigma_i = sqrt((P - l_i)/(P l_i)), and g applies
// sqrt(P/((P - l_i) l_i)) to w_i^H mu(y, v).
MetricProvider matrix_scaling_metric(
    const EigKept& eig, double power,
    const std::function<PosteriorStats(const Observation&)>& stats_provider) {
    const int r = static_cast<int>(eig.kept.size());
    MatrixXcd pi(r, eig.w.rows());
    MatrixXcd g_rows(r, eig.w.rows());
    for (int k = 0; k < r; ++k) {
        const double li = eig.lambdas[eig.kept[k]];
        const auto wh = eig.w.col(eig.kept[k]).adjoint();
        pi.row(k) = std::sqrt((power - li) / (power * li)) * wh;
        g_rows.row(k) = std::sqrt(power / ((power - li) * li)) * wh;
    }
    return [pi, g_rows, stats_provider](const Observation& obs) {
        if (!stats_provider)
            throw std::runtime_error(
                "metric provider requires a posterior-statistics provider");
        return MetricFactors{g_rows * stats_provider(obs).mu, pi};
    };
}

struct MeanCovAccum {
    MatrixXcd sum;
    std::int64_t count = 0;

    void init(int bx) {
        sum = MatrixXcd::Zero(bx, bx);
    }
    void add(const MatrixXcd& s) {
        if (count == 0 && sum.rows() != s.rows()) init(static_cast<int>(s.rows()));
        sum += s;
        ++count;
    }
    MatrixXcd mean() const { return sum / static_cast<double>(count); }
};

// Batch-means standard error of a scalar functional of the mean covariance.
double batch_se(const std::vector<double>& block_values) {
    StreamingMoments mom;
    for (double v : block_values) mom.add(v);
    return mom.std_err_of_mean();
}

}  // namespace

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::cssf: return "cssf";
        case Variant::cmsf: return "cmsf";
        case Variant::csi_ssf: return "csi_ssf";
        case Variant::csi_msf: return "csi_msf";
        case Variant::lin: return "lin";
    }
    return "?";
}

RestrictedVariantResult cssf(const StatsSampler& stats_sampler, double power,
                             std::int64_t n_samples, std::uint64_t seed,
                             int threads, const StatsProvider& stats_provider) {
    if (n_samples < 100)
        throw std::invalid_argument("cssf: n_samples must be >= 100");
    const BlockPlan plan = plan_blocks(n_samples);
    std::vector<StreamingMoments> trace_parts(plan.n_blocks);
    int bx_seen = 0;

    parallel_blocks(
        plan.n_blocks, seed,
        [&](std::int64_t b) {
            Rng rng = derive_stream(seed, static_cast<std::uint64_t>(b));
            for (std::int64_t s = plan.begin(b); s < plan.end(b); ++s) {
                const PosteriorStats st = stats_sampler(rng);
                trace_parts[b].add(st.sigma.real().trace() / st.dim());
                if (s == 0) bx_seen = st.dim();
            }
        },
        threads);

    StreamingMoments all;
    for (const auto& p : trace_parts) all.merge(p);
    const double t_hat = all.mean;
    if (!(t_hat > 0.0)) throw std::runtime_error("cssf: estimated T is not positive");

    RestrictedVariantResult out;
    out.variant = Variant::cssf;
    out.gmi.n_samples = all.count;
    out.gmi.std_err = all.std_err_of_mean() / t_hat;  // delta method on log
    if (t_hat >= power - kDegenerateTol * power) {
        out.gmi.value = 0.0;
        const int bx = bx_seen;
        out.metric_provider = [bx](const Observation&) {
            return MetricFactors{VectorXcd::Zero(bx),
                                 MatrixXcd::Zero(bx, bx)};
        };
        return out;
    }
    out.gmi.value = std::log(power / t_hat);
    const double alpha = std::sqrt((power - t_hat) / (power * t_hat));
    const double gcoef = std::sqrt(power / (t_hat * (power - t_hat)));
    out.metric_provider = [alpha, gcoef,
                           stats_provider](const Observation& obs) {
        if (!stats_provider)
            throw std::runtime_error(
                "cssf metric provider requires a posterior-statistics provider");
        const PosteriorStats st = stats_provider(obs);
        const int bx = st.dim();
        return MetricFactors{gcoef * st.mu,
                             alpha * MatrixXcd::Identity(bx, bx)};
    };
    return out;
}

RestrictedVariantResult cmsf(const StatsSampler& stats_sampler, double power,
                             std::int64_t n_samples, std::uint64_t seed,
                             int threads, const StatsProvider& stats_provider) {
    if (n_samples < 100)
        throw std::invalid_argument("cmsf: n_samples must be >= 100");
    const BlockPlan plan = plan_blocks(n_samples);
    std::vector<MeanCovAccum> parts(plan.n_blocks);

    parallel_blocks(
        plan.n_blocks, seed,
        [&](std::int64_t b) {
            Rng rng = derive_stream(seed, static_cast<std::uint64_t>(b));
            for (std::int64_t s = plan.begin(b); s < plan.end(b); ++s)
                parts[b].add(stats_sampler(rng).sigma);
        },
        threads);

    MatrixXcd total = parts[0].sum;
    std::int64_t count = parts[0].count;
    std::vector<double> block_gmis;
    for (std::size_t b = 0; b < parts.size(); ++b) {
        if (b > 0) {
            total += parts[b].sum;
            count += parts[b].count;
        }
        if (parts[b].count > 0)
            block_gmis.push_back(
                eig_for_matrix_scaling(parts[b].mean(), power).gmi);
    }
    const MatrixXcd sigma_bar =
        (total / static_cast<double>(count) +
         (total / static_cast<double>(count)).adjoint().eval()) /
        2.0;
    const EigKept eig = eig_for_matrix_scaling(sigma_bar, power);

    RestrictedVariantResult out;
    out.variant = Variant::cmsf;
    out.gmi.value = eig.gmi;
    out.gmi.std_err = batch_se(block_gmis);
    out.gmi.n_samples = count;
    out.metric_provider = matrix_scaling_metric(eig, power, stats_provider);
    return out;
}

namespace {

RestrictedVariantResult csi_variant(const CsiSampler& v_sampler,
                                    const StatsGivenCsi& stats_given_v,
                                    double power, std::int64_t n_samples,
                                    std::uint64_t seed, int threads,
                                    bool matrix_scaling) {
    const auto n_outer =
        static_cast<std::int64_t>(std::sqrt(static_cast<double>(n_samples)));
    const std::int64_t n_inner = n_outer;
    if (n_inner < 100)
        throw std::invalid_argument(
            "csi variants: inner sample count below 100 (need n_samples >= 1e4)");

    std::vector<double> per_v(n_outer);
    const BlockPlan plan = plan_blocks(n_outer);
    parallel_blocks(
        plan.n_blocks, seed,
        [&](std::int64_t b) {
            Rng rng = derive_stream(seed, static_cast<std::uint64_t>(b));
            for (std::int64_t s = plan.begin(b); s < plan.end(b); ++s) {
                const int v = v_sampler(rng);
                if (matrix_scaling) {
                    MeanCovAccum acc;
                    for (std::int64_t k = 0; k < n_inner; ++k)
                        acc.add(stats_given_v(v, rng).sigma);
                    per_v[s] = eig_for_matrix_scaling(acc.mean(), power).gmi;
                } else {
                    StreamingMoments tr;
                    int bx = 0;
                    for (std::int64_t k = 0; k < n_inner; ++k) {
                        const PosteriorStats st = stats_given_v(v, rng);
                        bx = st.dim();
                        tr.add(st.sigma.real().trace() / bx);
                    }
                    per_v[s] = tr.mean >= power - kDegenerateTol * power
                                   ? 0.0
                                   : std::log(power / tr.mean);
                }
            }
        },
        threads);

    StreamingMoments mom;
    for (double g : per_v) mom.add(g);
    RestrictedVariantResult out;
    out.variant = matrix_scaling ? Variant::csi_msf : Variant::csi_ssf;
    out.gmi.value = mom.mean;
    out.gmi.std_err = mom.std_err_of_mean();
    out.gmi.n_samples = n_outer * n_inner;
    out.metric_provider = [](const Observation&) -> MetricFactors {
        throw std::runtime_error(
            "csi variant metric is built per v; use the per-v construction");
    };
    return out;
}

}  // namespace

RestrictedVariantResult csi_ssf(const CsiSampler& v_sampler,
                                const StatsGivenCsi& stats_given_v,
                                double power, std::int64_t n_samples,
                                std::uint64_t seed, int threads) {
    return csi_variant(v_sampler, stats_given_v, power, n_samples, seed,
                       threads, false);
}

RestrictedVariantResult csi_msf(const CsiSampler& v_sampler,
                                const StatsGivenCsi& stats_given_v,
                                double power, std::int64_t n_samples,
                                std::uint64_t seed, int threads) {
    return csi_variant(v_sampler, stats_given_v, power, n_samples, seed,
                       threads, true);
}

MatrixXcd linear_q_matrix(const CorrelationPair& corr, double power) {
    if (corr.yy.rows() != corr.yy.cols())
        throw std::invalid_argument("E[YY^H] must be square");
    if ((corr.yy - corr.yy.adjoint()).norm() >
        1e-10 * std::max(corr.yy.norm(), 1e-300))
        throw std::invalid_argument("E[YY^H] must be Hermitian");

    // Moore-Penrose pseudoinverse with singular values below
    // 1e-12 * sigma_max treated as zero.
    Eigen::JacobiSVD<MatrixXcd> svd(corr.yy,
                                    Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cutoff = 1e-12 * svd.singularValues().maxCoeff();
    VectorXd inv_sv = VectorXd::Zero(svd.singularValues().size());
    for (int i = 0; i < inv_sv.size(); ++i)
        if (svd.singularValues()[i] > cutoff)
            inv_sv[i] = 1.0 / svd.singularValues()[i];
    const MatrixXcd yy_pinv = svd.matrixV() * inv_sv.asDiagonal() *
                              svd.matrixU().adjoint();
    MatrixXcd q = corr.xy * yy_pinv * corr.xy.adjoint();
    q = 0.5 * (q + q.adjoint().eval());

    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(q, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().maxCoeff() >= power - kDegenerateTol * power)
        throw std::runtime_error(
            "linear variant: lambda_max(Q) reaches the power level");
    return q;
}

namespace {

double linear_gmi_from_q(const MatrixXcd& q, double power) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(q, Eigen::EigenvaluesOnly);
    const int bx = static_cast<int>(q.rows());
    double acc = 0.0;
    for (int i = 0; i < bx; ++i) {
        const double li = std::max(es.eigenvalues()[i], 0.0);
        acc += std::log(power / (power - li));
    }
    return acc / bx;
}

}  // namespace

RestrictedVariantResult linear_variant(const CorrelationsProvider& correlations,
                                       const std::vector<double>& v_probs,
                                       double power) {
    if (v_probs.empty()) throw std::invalid_argument("linear_variant: empty CSI law");

    struct PerV {
        MatrixXcd gamma;
        MatrixXcd pi;
    };
    auto per_v = std::make_shared<std::vector<PerV>>(v_probs.size());
    double gmi = 0.0;
    for (std::size_t v = 0; v < v_probs.size(); ++v) {
        const CorrelationPair corr = correlations(static_cast<int>(v));
        const MatrixXcd q = linear_q_matrix(corr, power);
        gmi += v_probs[v] * linear_gmi_from_q(q, power);

        // Eigenpairs in ascending order; directions with zero eigenvalue
        // carry no signal and are dropped.
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(q);
        const int bx = static_cast<int>(q.rows());
        std::vector<int> kept;
        for (int i = 0; i < bx; ++i)
            if (es.eigenvalues()[i] > 1e-12 * power) kept.push_back(i);
        const int r = static_cast<int>(kept.size());
        MatrixXcd wk(bx, r);
        VectorXd diag(r);
        for (int k = 0; k < r; ++k) {
            const double li = es.eigenvalues()[kept[k]];
            wk.col(k) = es.eigenvectors().col(kept[k]);
            diag[k] = std::sqrt(power / ((power - li) * li));
        }
        // Pseudoinverse as in linear_q_matrix.
        Eigen::JacobiSVD<MatrixXcd> svd(
            corr.yy, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double cutoff = 1e-12 * svd.singularValues().maxCoeff();
        VectorXd inv_sv = VectorXd::Zero(svd.singularValues().size());
        for (int i = 0; i < inv_sv.size(); ++i)
            if (svd.singularValues()[i] > cutoff)
                inv_sv[i] = 1.0 / svd.singularValues()[i];
        const MatrixXcd yy_pinv = svd.matrixV() * inv_sv.asDiagonal() *
                                  svd.matrixU().adjoint();
        (*per_v)[v].gamma = yy_pinv * corr.xy.adjoint() * diag.asDiagonal() * wk;
        (*per_v)[v].pi = diag.asDiagonal() * wk.adjoint();
    }

    RestrictedVariantResult out;
    out.variant = Variant::lin;
    out.gmi = {gmi, 0.0, 1, false};
    out.metric_provider = [per_v](const Observation& obs) {
        const auto& pv = per_v->at(static_cast<std::size_t>(obs.v));
        return MetricFactors{pv.gamma.adjoint() * obs.y, pv.pi};
    };
    return out;
}

RestrictedVariantResult linear_variant_sampled(const JointSampler& sampler,
                                               double power,
                                               std::int64_t n_samples,
                                               std::uint64_t seed,
                                               int threads) {
    if (n_samples < 100)
        throw std::invalid_argument("linear_variant_sampled: n_samples must be >= 100");
    const BlockPlan plan = plan_blocks(n_samples);
    struct Corr {
        MatrixXcd xy, yy;
        std::int64_t count = 0;
    };
    std::vector<Corr> parts(plan.n_blocks);

    parallel_blocks(
        plan.n_blocks, seed,
        [&](std::int64_t b) {
            Rng rng = derive_stream(seed, static_cast<std::uint64_t>(b));
            for (std::int64_t s = plan.begin(b); s < plan.end(b); ++s) {
                const JointDraw d = sampler(rng);
                if (parts[b].count == 0) {
                    parts[b].xy = MatrixXcd::Zero(d.x.size(), d.obs.y.size());
                    parts[b].yy = MatrixXcd::Zero(d.obs.y.size(), d.obs.y.size());
                }
                parts[b].xy += d.x * d.obs.y.adjoint();
                parts[b].yy += d.obs.y * d.obs.y.adjoint();
                ++parts[b].count;
            }
        },
        threads);

    MatrixXcd xy = parts[0].xy, yy = parts[0].yy;
    std::int64_t count = parts[0].count;
    for (std::size_t b = 1; b < parts.size(); ++b) {
        xy += parts[b].xy;
        yy += parts[b].yy;
        count += parts[b].count;
    }
    const double n = static_cast<double>(count);
    const CorrelationPair corr{xy / n, yy / n};

    RestrictedVariantResult out =
        linear_variant([&](int) { return corr; }, {1.0}, power);

    // Leave-one-block-out jackknife for the standard error; unlike raw
    // per-block estimates, every leave-out correlation stays close to the
    // full-sample one, keeping lambda_max(Q) inside the feasible region.
    std::vector<double> loo;
    for (const auto& part : parts) {
        if (part.count == 0) continue;
        const double nl = n - static_cast<double>(part.count);
        loo.push_back(linear_gmi_from_q(
            linear_q_matrix({(xy - part.xy) / nl, (yy - part.yy) / nl}, power),
            power));
    }
    const double k = static_cast<double>(loo.size());
    double mean = 0.0;
    for (double v : loo) mean += v;
    mean /= k;
    double ss = 0.0;
    for (double v : loo) ss += (v - mean) * (v - mean);
    out.gmi.std_err = std::sqrt((k - 1.0) / k * ss);
    out.gmi.n_samples = count;
    return out;
}

OrderingReport ordering_check(const OrderingInputs& in) {
    const auto combined = [](const GmiEstimate& a, const GmiEstimate& b) {
        return 3.0 * std::sqrt(a.std_err * a.std_err + b.std_err * b.std_err);
    };
    const GmiEstimate& inner_max =
        in.csi_ssf.value >= in.cmsf.value ? in.csi_ssf : in.cmsf;

    OrderingReport rep;
    const auto add = [&](const std::string& name, const GmiEstimate& lhs,
                         const GmiEstimate& rhs) {
        OrderingCheck c;
        c.name = name;
        c.slack = lhs.value - rhs.value;
        c.tol = combined(lhs, rhs);
        c.pass = c.slack >= -c.tol;
        rep.checks.push_back(c);
    };
    add("opt >= csi_msf", in.opt, in.csi_msf);
    add("csi_msf >= csi_ssf", in.csi_msf, in.csi_ssf);
    add("csi_msf >= cmsf", in.csi_msf, in.cmsf);
    add("max(csi_ssf, cmsf) >= cssf", inner_max, in.cssf);
    add("csi_msf >= lin", in.csi_msf, in.lin);
    rep.all_pass = std::all_of(rep.checks.begin(), rep.checks.end(),
                               [](const OrderingCheck& c) { return c.pass; });
    return rep;
}

}  // namespace vecgnndr
