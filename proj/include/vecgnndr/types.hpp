#ifndef VECGNNDR_TYPES_HPP
#define VECGNNDR_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>

namespace vecgnndr {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

// Conditional mean and conditional covariance of the input given one
// observation. sigma is Hermitian PSD with trace at most B_x * P.
struct PosteriorStats {
    VectorXcd mu;
    MatrixXcd sigma;

    int dim() const { return static_cast<int>(mu.size()); }
};

// Eigensystem of a conditional covariance together with its truncated
// eigenvalues. eigvals are descending; trunc_eigvals[i] equals eigvals[i]
// below the power level and P/(P+delta_eps) at or above it.
struct TruncatedSpectrum {
    VectorXd eigvals;
    MatrixXcd eigvecs;   // columns match eigvals order
    VectorXd trunc_eigvals;
    double delta_eps = 0.0;
};

// One evaluated decoding metric: the decoder minimizes ||g - f*x||^2.
// f may have fewer rows than columns when directions carry no rate.
struct MetricFactors {
    VectorXcd g;
    MatrixXcd f;
};

// A GMI value in nats per input symbol. std_err is zero exactly when the
// value came from a closed form rather than Monte Carlo.
struct GmiEstimate {
    double value = 0.0;
    double std_err = 0.0;
    std::int64_t n_samples = 1;
    // Set when the theta maximizer collapsed to the upper boundary
    // (degenerate metric, GMI reported as zero).
    bool degenerate = false;
};

// Channel output plus discrete receiver CSI (v = 0 when the channel has
// no CSI).
struct Observation {
    VectorXcd y;
    int v = 0;
};

class Rng;

struct JointDraw {
    VectorXcd x;
    Observation obs;
};

using JointSampler = std::function<JointDraw(Rng&)>;
using StatsSampler = std::function<PosteriorStats(Rng&)>;
using MetricProvider = std::function<MetricFactors(const Observation&)>;
using StatsProvider = std::function<PosteriorStats(const Observation&)>;

}  // namespace vecgnndr

#endif
