#include "vecgnndr/channels.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "vecgnndr/core.hpp"
#include "vecgnndr/quadrature.hpp"

namespace vecgnndr {

// --------------------------- block noncoherent -----------------------------

BncDraw bnc_sample(const BlockNoncoherentParams& p, Rng& rng) {
    BncDraw d;
    d.x = rng.cnormal_vec(p.b_x, p.power);
    d.theta = rng.uniform(0.0, 2.0 * M_PI);
    const cplx rot(std::cos(d.theta), std::sin(d.theta));
    d.y = rot * d.x + rng.cnormal_vec(p.b_x, p.sigma2);
    return d;
}

PosteriorStats bnc_posterior_stats(const VectorXcd& y,
                                   const BlockNoncoherentParams& p) {
    const double ps = p.power + p.sigma2;
    const double iso = p.power * p.sigma2 / ps;
    const double coef = (p.power / ps) * (p.power / ps);
    PosteriorStats st;
    st.mu = VectorXcd::Zero(y.size());
    st.sigma = iso * MatrixXcd::Identity(y.size(), y.size()) +
               coef * (y * y.adjoint());
    return st;
}

namespace {

// Integrand of the chi^2 expectation shared by the optimal and element-wise
// closed forms.
double bnc_low_tail_term(double power, double sigma2, int dof) {
    const double ps = power + sigma2;
    const auto f = [&](double t) {
        return std::log(ps / (sigma2 + power * t / 2.0)) +
               power * (t - 2.0) / (2.0 * ps);
    };
    return chi2_expectation(f, dof, 0.0, 2.0, 1e-10);
}

}  // namespace

GmiEstimate bnc_optimal_gmi(const BlockNoncoherentParams& p) {
    const double head =
        (p.b_x - 1.0) / p.b_x *
        (std::log(1.0 + p.power / p.sigma2) - p.power / (p.power + p.sigma2));
    const double tail = bnc_low_tail_term(p.power, p.sigma2, 2 * p.b_x) / p.b_x;
    return {head + tail, 0.0, 1, false};
}

GmiEstimate bnc_elementwise_gmi(const BlockNoncoherentParams& p) {
    return {bnc_low_tail_term(p.power, p.sigma2, 2), 0.0, 1, false};
}

MetricFactors bnc_optimal_metric(const VectorXcd& y,
                                 const BlockNoncoherentParams& p,
                                 double /*eps*/) {
    const int bx = p.b_x;
    const double ps = p.power + p.sigma2;
    const double norm_sq = y.squaredNorm();
    const double lambda1 =
        p.power * p.sigma2 / ps + std::pow(p.power / ps, 2) * norm_sq;
    const double inv_sigma = 1.0 / std::sqrt(p.sigma2);

    // Orthonormal basis with first column y/||y||; any basis serves when
    // y = 0 (the spectrum is isotropic there).
    MatrixXcd w = MatrixXcd::Identity(bx, bx);
    if (norm_sq > 0.0) {
        Eigen::HouseholderQR<MatrixXcd> qr(y);
        w = qr.householderQ();
        // Fix the first column to y/||y|| exactly (QR determines it up to
        // phase).
        const cplx phase = (w.col(0).adjoint() * y)(0);
        w.col(0) *= phase / std::abs(phase);
    }

    MetricFactors m;
    if (norm_sq < ps) {
        VectorXd fdiag = VectorXd::Constant(bx, inv_sigma);
        fdiag[0] = std::sqrt((p.power - lambda1) / (p.power * lambda1));
        m.g = VectorXcd::Zero(bx);
        m.f = fdiag.asDiagonal() * w.adjoint();
    } else {
        m.g = VectorXcd::Zero(bx - 1);
        m.f = inv_sigma * w.rightCols(bx - 1).adjoint();
    }
    return m;
}

StatsSampler bnc_stats_sampler(const BlockNoncoherentParams& p) {
    return [p](Rng& rng) { return bnc_posterior_stats(bnc_sample(p, rng).y, p); };
}

JointSampler bnc_joint_sampler(const BlockNoncoherentParams& p) {
    return [p](Rng& rng) {
        const BncDraw d = bnc_sample(p, rng);
        return JointDraw{d.x, Observation{d.y, 0}};
    };
}

// ------------------------------ phase noise --------------------------------

PncDraw pnc_sample(const PhaseNoiseParams& p, Rng& rng) {
    PncDraw d;
    d.x = rng.cnormal_vec(p.b_x, p.power);
    d.phi.resize(p.b_x);
    double phase = 0.0;
    for (int i = 0; i < p.b_x; ++i) {
        phase += p.c * rng.normal();
        d.phi[i] = phase;
    }
    d.y.resize(p.b_x);
    for (int i = 0; i < p.b_x; ++i) {
        const cplx rot(std::cos(d.phi[i]), std::sin(d.phi[i]));
        d.y[i] = rot * d.x[i] + rng.cnormal(p.sigma2);
    }
    return d;
}

PncLinearResult pnc_linear_gmi(const PhaseNoiseParams& p) {
    PncLinearResult out;
    out.gamma.resize(p.b_x);
    out.pi.resize(p.b_x);
    double acc = 0.0;
    const double ps = p.power + p.sigma2;
    for (int i = 1; i <= p.b_x; ++i) {
        const double resid = p.power * (1.0 - std::exp(-p.c * p.c * i)) + p.sigma2;
        acc += std::log(ps / resid);
        out.gamma[i - 1] = 1.0 / std::sqrt(resid);
        out.pi[i - 1] =
            ps / (p.power * std::exp(-0.5 * p.c * p.c * i) * std::sqrt(resid));
    }
    out.gmi = {acc / p.b_x, 0.0, 1, false};
    return out;
}

namespace {

double pnc_identity_mismatch(const PhaseNoiseParams& p) {
    double s = 0.0;
    for (int i = 1; i <= p.b_x; ++i) s += 1.0 - std::exp(-0.5 * p.c * p.c * i);
    return s;  // sum of (1 - e^{-c^2 i / 2})
}

}  // namespace

double pnc_identity_objective(const PhaseNoiseParams& p, double theta) {
    const double a =
        p.sigma2 + 2.0 * p.power / p.b_x * pnc_identity_mismatch(p);
    return theta * a -
           (p.power + p.sigma2) * theta / (1.0 - theta * p.power) +
           std::log(1.0 - theta * p.power);
}

double pnc_identity_theta_star(const PhaseNoiseParams& p) {
    const double a =
        p.sigma2 + 2.0 * p.power / p.b_x * pnc_identity_mismatch(p);
    return (2.0 * a - p.power -
            std::sqrt(p.power * p.power + 4.0 * a * (p.power + p.sigma2))) /
           (2.0 * a * p.power);
}

GmiEstimate pnc_identity_gmi(const PhaseNoiseParams& p) {
    return {pnc_identity_objective(p, pnc_identity_theta_star(p)), 0.0, 1,
            false};
}

double pnc_identity_gmi_high_snr_limit(const PhaseNoiseParams& p) {
    const double s = 2.0 / p.b_x * pnc_identity_mismatch(p);
    const double root = std::sqrt(1.0 + 4.0 * s);
    return s + 1.0 - root + std::log(2.0 / (root - 1.0));
}

JointSampler pnc_joint_sampler(const PhaseNoiseParams& p) {
    return [p](Rng& rng) {
        const PncDraw d = pnc_sample(p, rng);
        return JointDraw{d.x, Observation{d.y, 0}};
    };
}

// --------------------------------- ACGNC -----------------------------------

VectorXcd acgnc_sample_y(const AcgncParams& p, const VectorXcd& x, Rng& rng) {
    const int by = static_cast<int>(p.a.rows());
    // Colored noise: Sigma^{1/2} z with z ~ CN(0, I).
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(p.sigma_noise);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("acgnc: Sigma_noise must be positive definite");
    const MatrixXcd sqrt_s = es.operatorSqrt();
    return p.a * x + sqrt_s * rng.cnormal_vec(by, 1.0);
}

JointSampler acgnc_joint_sampler(const AcgncParams& p) {
    const int bx = static_cast<int>(p.a.cols());
    return [p, bx](Rng& rng) {
        JointDraw d;
        d.x = rng.cnormal_vec(bx, p.power);
        d.obs = Observation{acgnc_sample_y(p, d.x, rng), 0};
        return d;
    };
}

PosteriorStats acgnc_posterior_stats(const VectorXcd& y, const AcgncParams& p) {
    const int bx = static_cast<int>(p.a.cols());
    const MatrixXcd sinv = p.sigma_noise.inverse();
    const MatrixXcd prec =
        p.a.adjoint() * sinv * p.a + MatrixXcd::Identity(bx, bx) / p.power;
    PosteriorStats st;
    st.sigma = prec.inverse();
    st.sigma = 0.5 * (st.sigma + st.sigma.adjoint().eval());
    st.mu = st.sigma * (p.a.adjoint() * (sinv * y));
    return st;
}

StatsSampler acgnc_stats_sampler(const AcgncParams& p) {
    auto joint = acgnc_joint_sampler(p);
    return [p, joint](Rng& rng) {
        return acgnc_posterior_stats(joint(rng).obs.y, p);
    };
}

AcgncOptimal acgnc_optimal(const AcgncParams& p) {
    if (p.a.rows() != p.a.cols())
        throw std::invalid_argument("acgnc_optimal: B_y must equal B_x");
    const int bx = static_cast<int>(p.a.cols());

    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(p.sigma_noise);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("acgnc: Sigma_noise must be positive definite");
    const MatrixXcd s_inv_half = es.operatorInverseSqrt();

    const MatrixXcd m = s_inv_half * p.a;
    Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const MatrixXcd f = svd.singularValues().asDiagonal() *
                        svd.matrixV().adjoint();
    const MatrixXcd g_map = svd.matrixU().adjoint() * s_inv_half;

    const MatrixXcd inner = p.power * p.a.adjoint() *
                                p.sigma_noise.inverse() * p.a +
                            MatrixXcd::Identity(bx, bx);
    const double gmi = std::log(std::abs(inner.determinant())) / bx;

    AcgncOptimal out;
    out.gmi = {gmi, 0.0, 1, false};
    out.metric = [f, g_map](const Observation& obs) {
        return MetricFactors{g_map * obs.y, f};
    };
    return out;
}

MetricProvider acgnc_ml_metric(const AcgncParams& p) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(p.sigma_noise);
    const MatrixXcd s_inv_half = es.operatorInverseSqrt();
    const MatrixXcd f = s_inv_half * p.a;
    return [s_inv_half, f](const Observation& obs) {
        return MetricFactors{s_inv_half * obs.y, f};
    };
}

// ------------------------------- memoryless --------------------------------

MemorylessResult memoryless_gnndr(const StatsSampler& scalar_stats_sampler,
                                  double power, double eps,
                                  std::int64_t n_samples, std::uint64_t seed,
                                  int threads) {
    StatsSampler checked = [scalar_stats_sampler](Rng& rng) {
        PosteriorStats st = scalar_stats_sampler(rng);
        if (st.dim() != 1)
            throw std::invalid_argument("memoryless_gnndr: statistics must be scalar");
        return st;
    };
    MemorylessResult out;
    out.gmi = optimal_gmi(checked, power, n_samples, seed, threads);
    out.metric_from_stats = [power, eps](const PosteriorStats& st) {
        return optimal_metric(st, power, eps);
    };
    return out;
}

}  // namespace vecgnndr
