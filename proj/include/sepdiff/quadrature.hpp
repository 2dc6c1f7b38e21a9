#pragma once

#include <functional>
#include <vector>

namespace sepdiff {

using Integrand = std::function<double(double)>;

struct QuadOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-300;
    int max_panels = 1 << 16;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int panels = 0;
    bool converged = false;
};

// Adaptive bisection with a 7/15-point Gauss-Kronrod pair per panel.
// Infinite limits are mapped by x = t/(1-t).
QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opts = {});

// Same, but throws QuadratureFailure when the tolerance is not met.
double integrate_or_throw(const Integrand& f, double a, double b, const QuadOptions& opts = {});

// Tridiagonal system: sub[i]*x[i-1] + diag[i]*x[i] + sup[i]*x[i+1] = rhs[i].
std::vector<double> solve_tridiagonal(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup,
                                      std::vector<double> rhs);

}  // namespace sepdiff
