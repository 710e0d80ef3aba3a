#pragma once

#include <array>
#include <complex>
#include <utility>
#include <vector>

#include "hzeta/fourier.hpp"
#include "hzeta/geometry.hpp"
#include "hzeta/heights.hpp"
#include "hzeta/numeric.hpp"
#include "hzeta/rational.hpp"

namespace hzeta::assembly {

using arith::Complex;
using heights::PicParam;

/// Knobs for the archimedean quadratures.
struct QuadConfig {
    double tolerance = 1e-9;      // absolute tolerance per transform value
    double log_range = 40;        // |log a| integration range safety margin
    double x_truncation = 1e4;    // truncation radius for the unipotent coordinate
    long max_evals = 4000000;     // integrand evaluation budget per transform
    bool force_2d = false;        // disable the separated fast paths (self-tests)
};

struct InftyResult {
    Complex value{0.0, 0.0};
    double error = 0;  // quadrature error estimate + truncation tails
};

/**
 * Archimedean height transform
 *   hhat_infty(s, alpha, t) = integral over the real group of
 *     H_oo(s, (x, a))^{-1} |a|^{i t} exp(2 pi i alpha x) dx da/|a|
 * evaluated after splitting off |a| = e^u.  Fast paths: closed-form inner
 * integral for alpha = 0, and a Bessel-K reduction of the inner integral for
 * real s; otherwise nested adaptive quadrature.  Requires s strictly inside
 * the convergence cone (Re s0 > -1, Re s2 > 0, Re(2s0+s2) > 0) and
 * Re(s0+s2) > 1 for absolute convergence of the inner integral
 * (and Re s2 > 2 when alpha = 0, where there is no oscillatory decay).
 */
InftyResult hhat_infty(const PicParam& s, const Rational& alpha, double t,
                       const QuadConfig& cfg = {});
InftyResult hhat_infty(const PicParam& s, double alpha, double t,
                       const QuadConfig& cfg = {});

/// Expected leading constant, assembled from local densities:
/// cone factor  x  archimedean density  x  regularized finite product.
struct DensityConstant {
    double value = 0;          // the product below
    double cone_factor = 0;    // Laplace transform of the effective cone at kappa
    double tau_infinity = 0;   // archimedean density (transform at s = kappa)
    double finite_product = 0; // prod over p <= cutoff of the convergence factors
    double tail_bound = 0;     // bound for the neglected p > cutoff factors
    std::vector<std::pair<long, double>> first_factors;  // (p, local factor), p <= 50
};
DensityConstant peyre_constant(const geom::VarietyModel& model, long prime_cutoff,
                               const QuadConfig& cfg = {});

/// The identity-character part of the height zeta function at s = sigma*kappa,
/// computed by Mellin inversion in |a|:
///   Z0(sigma) = residue term + (1/2pi) * contour integral below the pole
/// evaluated at sigma = 1 + h for the h-samples, then Richardson-extrapolated
/// to the leading constant lim h -> 0 of h * Z0(1+h).
struct Z0Result {
    double constant = 0;                 // extrapolated lim h*Z0(1+h)
    std::array<double, 3> h_samples{};   // h * Z0(1+h) at the three h values
    std::array<double, 3> h_values{};
    double tail_estimate = 0;            // contour truncation + Euler tail estimate
};
Z0Result z0_constant(const geom::VarietyModel& model, long prime_cutoff,
                     const QuadConfig& cfg = {});

/// One alpha-term of the non-trivial part of the zeta function: the product
/// of hhat_p_twisted over p <= prime_cutoff (closed ratios off the support of
/// alpha) times hhat_infty, at parameter s and twist t.
Complex z1_term(const PicParam& s, const Rational& alpha, double t, long prime_cutoff,
                const QuadConfig& cfg = {});

struct Z1Partial {
    double value = 0;          // partial sum over 0 < |alpha| height <= range
    double alpha_tail = 0;     // extrapolated remainder of the alpha sum
    double t_tail = 0;         // bound for the truncated twist integral
    double beta_slope = 0;     // fitted decay exponent of the numerator sums
    double gamma_slope = 0;    // fitted decay exponent of the denominator sums
    long terms = 0;
};

/**
 * Partial sum over nonzero rational characters alpha = beta/gamma (gcd = 1,
 * 0 < beta, gamma <= alpha_range, both signs of beta via symmetry) of the
 * twist-integrated term
 *   (1/2pi) * integral over t of z1_term(s, alpha, t, prime_cutoff),
 * with the t-integral truncated to [-t_max, t_max] on a fixed grid of
 * t_grid Gauss-Kronrod nodes.  Returns the partial sum together with
 * extrapolated tails and the fitted decay exponents used for them.
 */
Z1Partial z1_partial_sum(const PicParam& s, int alpha_range, int t_grid,
                         long prime_cutoff, double t_max = 12.0,
                         const QuadConfig& cfg = {});

}  // namespace hzeta::assembly
