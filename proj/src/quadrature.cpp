#include "vecgnndr/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace vecgnndr {

namespace {

// Gauss-Kronrod 15-point nodes/weights on [-1, 1] with the embedded
// 7-point Gauss rule (standard QUADPACK values).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Gk15 {
    double integral;
    double error;
};

Gk15 gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double res_g = fc * kWg[3];
    double res_k = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const double fsum = f(c - x) + f(c + x);
        res_k += kWgk[j] * fsum;
        if (j % 2 == 1) res_g += kWg[j / 2] * fsum;
    }
    res_g *= h;
    res_k *= h;
    return {res_k, std::abs(res_k - res_g)};
}

void integrate_rec(const std::function<double(double)>& f, double a, double b,
                   double tol, int depth, double& acc) {
    const Gk15 r = gk15(f, a, b);
    if (r.error <= tol || b - a < 1e-14 * (std::abs(a) + 1.0)) {
        acc += r.integral;
        return;
    }
    if (depth > 60) throw std::runtime_error("adaptive quadrature did not converge");
    const double c = 0.5 * (a + b);
    integrate_rec(f, a, c, tol * 0.5, depth + 1, acc);
    integrate_rec(f, c, b, tol * 0.5, depth + 1, acc);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol) {
    if (!(b > a)) return 0.0;
    double acc = 0.0;
    integrate_rec(f, a, b, abs_tol, 0, acc);
    return acc;
}

double chi2_pdf(double x, int dof) {
    if (x <= 0.0) {
        return (dof == 2 && x == 0.0) ? 0.5 : 0.0;
    }
    const double k2 = 0.5 * dof;
    const double logp =
        (k2 - 1.0) * std::log(x) - 0.5 * x - k2 * std::log(2.0) - std::lgamma(k2);
    return std::exp(logp);
}

double chi2_expectation(const std::function<double(double)>& f, int dof,
                        double lo, double hi, double abs_tol) {
    if (lo < 0.0) lo = 0.0;
    const auto g = [&](double t) { return f(t) * chi2_pdf(t, dof); };
    if (std::isfinite(hi)) {
        return integrate_adaptive(g, lo, hi, abs_tol);
    }
    // Map [lo, inf) onto u in [0, 1) via t = lo + u/(1-u).
    const auto gm = [&](double u) {
        const double om = 1.0 - u;
        const double t = lo + u / om;
        return g(t) / (om * om);
    };
    return integrate_adaptive(gm, 0.0, 1.0 - 1e-14, abs_tol);
}

}  // namespace vecgnndr
