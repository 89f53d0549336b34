#ifndef VECGNNDR_QUADRATURE_HPP
#define VECGNNDR_QUADRATURE_HPP

#include <functional>
#include <limits>

namespace vecgnndr {

// Adaptive Gauss-Kronrod 15(7) integration of f over [a, b] to the given
// absolute tolerance. Throws on non-convergence (subdivision exhaustion).
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol);

// chi^2 density with dof degrees of freedom, stable for large dof.
double chi2_pdf(double x, int dof);

// E[f(T)] restricted to T in [lo, hi] for T ~ chi^2(dof). hi may be
// +infinity (mapped onto a finite interval before integrating).
double chi2_expectation(const std::function<double(double)>& f, int dof,
                        double lo, double hi, double abs_tol);

}  // namespace vecgnndr

#endif
