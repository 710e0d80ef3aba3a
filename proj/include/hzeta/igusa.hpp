#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "hzeta/arith.hpp"
#include "hzeta/rational.hpp"

namespace hzeta::igusa {

using arith::Complex;

/// Rectangular range of valuation shells: n in [n_min, n_max], m in
/// [m_min, m_max]; an absent upper end means unbounded.
struct ShellRange {
    int n_min = 0;
    std::optional<int> n_max;
    int m_min = 0;
    std::optional<int> m_max;

    /// Shells covering Z_p x Z_p (valuations >= 0).
    static ShellRange integers() { return {0, std::nullopt, 0, std::nullopt}; }
    /// Shells covering the square of the maximal ideal (valuations >= 1).
    static ShellRange maximal_ideal() { return {1, std::nullopt, 1, std::nullopt}; }
};

/**
 * Data of a two-variable monomial twisted shell sum at the prime p:
 *   eta_alpha(s1, s2) = sum over shells (n, m) in range of
 *     p^{-(n s1 + m s2)} * (average over unit pairs (u, v) of
 *                            psi_p(alpha * p^{n d + m e} u^d v^e))
 * where the average is with respect to Haar probability measure on
 * Z_p^* x Z_p^*.  Exponents d, e may be negative.
 */
struct MonomialSum {
    long p = 2;
    long d = -1;
    long e = -1;
    Rational alpha = Rational(1);
    ShellRange range = ShellRange::maximal_ideal();
};

/// Convergence domain gate for the shell sum: the open cone that the sign
/// pattern of (d, e) dictates.  Returns a human-readable reason when (s1, s2)
/// lies outside it.
std::optional<std::string> outside_convergence_cone(long d, long e, Complex s1, Complex s2);

struct EtaResult {
    Complex value{0.0, 0.0};
    double tail_bound = 0;   // bound on the truncated shells
    long shells = 0;         // shells actually accumulated
    long survivors = 0;      // shells whose unit average was not exactly 0
    int max_n = 0, max_m = 0;
    std::vector<std::pair<int, int>> survivor_shells;  // capped at 4096 entries
};

/// Evaluate the shell sum to absolute accuracy tol.  Throws std::domain_error
/// outside the convergence cone, num::tolerance_error when the brute-force
/// depth needed for some unit average exceeds the budget.
EtaResult eta_eval(const MonomialSum& spec, Complex s1, Complex s2, double tol);

/// Theoretical decay exponent: |eta| should be O(|alpha|_p^{-kappa-eps}) as
/// |alpha|_p -> 0, with kappa = max(0, -Re s1/|d| for d<0, -Re s2/|e| for e<0).
double decay_exponent(long d, long e, Complex s1, Complex s2);

struct DecayFit {
    double slope = 0;          // fitted slope of log|eta| against k log p
    double kappa = 0;          // theoretical exponent
    std::vector<double> log_values;
};

/// Evaluate eta at alpha = p^k for k = 1..k_max and fit the growth rate of
/// log|eta| against k log p; the slope should match decay_exponent to within
/// the tolerance of the proposition being exercised.
DecayFit eta_decay_fit(long p, long d, long e, Complex s1, Complex s2, int k_max,
                       const ShellRange& range, double tol = 1e-9);

}  // namespace hzeta::igusa
