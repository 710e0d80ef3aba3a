#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hzeta::num {

using Complex = std::complex<double>;

/// Thrown when a quadrature or series evaluation cannot reach the requested
/// tolerance within its evaluation budget.
struct tolerance_error : std::runtime_error {
    explicit tolerance_error(const std::string& what) : std::runtime_error(what) {}
};

struct QuadResult {
    Complex value{0.0, 0.0};
    double error = 0;       // estimated absolute error
    long evaluations = 0;   // number of integrand calls
};

/**
 * Globally adaptive Gauss-Kronrod 7/15 quadrature of a complex-valued
 * integrand on [a, b].  The interval is split into `initial_panels` equal
 * panels, then the panel with the largest error estimate is bisected until
 * the summed error estimate drops below abs_tol or the evaluation budget is
 * exhausted (in which case the result so far is returned with its honest
 * error estimate; callers decide whether that is fatal).
 */
QuadResult integrate_gk(const std::function<Complex(double)>& f, double a, double b,
                        double abs_tol, int initial_panels = 1, long max_evals = 2000000);

/// Least-squares straight line y ~ intercept + slope * x.
struct LineFit {
    double slope = 0;
    double intercept = 0;
    double max_residual = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Slope of log(y) against log(x); used for empirical decay-exponent checks.
/// Entries with y <= floor are dropped; throws std::invalid_argument if
/// fewer than two usable points remain.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                   double floor = 1e-300);

/// Round a double to 12 significant decimal digits (used to make emitted
/// reports byte-stable across platforms and thread counts).
double round12(double v);

}  // namespace hzeta::num
