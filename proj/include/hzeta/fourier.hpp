#pragma once

#include <complex>
#include <optional>

#include "hzeta/arith.hpp"
#include "hzeta/geometry.hpp"
#include "hzeta/heights.hpp"
#include "hzeta/rational.hpp"

namespace hzeta::fourier {

using arith::Complex;
using heights::PicParam;

/// Average of psi_p(x * u) over the unit group of Z_p (Haar probability
/// measure), as an exact rational: 1 if v_p(x) >= 0, -1/(p-1) if v_p(x) = -1,
/// 0 if v_p(x) <= -2.
Rational unit_character_moment(const Rational& x, long p);

/// Average of psi_p(a * u^d) over units u, computed by brute force over the
/// residues mod p^depth.  Requires depth large enough that the phase is
/// constant on residue classes (throws std::invalid_argument otherwise).
Complex monomial_character_moment(const Rational& a, long d, long p, int depth);

/// Known exact branch of the monomial moment: 0 whenever p does not divide d
/// and v_p(a) <= -2.  Returns nullopt when no exact branch applies.
std::optional<Complex> monomial_moment_exact(const Rational& a, long d, long p);

struct LocalTransform {
    Complex value{0.0, 0.0};
    double error_bound = 0;  // rigorous bound: truncation tails + roundoff slack
    long shells = 0;         // number of (i, j) valuation shells accumulated
};

/// Shell ranges and brute-force depth for the quadrature-free local oracle.
struct OracleConfig {
    int i_min = -14;          // lowest valuation of x
    int i_max = 28;           // highest valuation of x (>= 2*j_max so the
                              // diagonal corner of the shell fan is covered)
    int j_min = -14;          // lowest valuation of a (ignored where the
                              // character forces a sharper cutoff)
    int j_max = 14;           // highest valuation of a
    int residue_depth = 14;   // unit averages are taken mod p^depth
    double tolerance = 1e-8;  // target total error bound

    /// Choose ranges and depth so the rigorous tail bounds come out below
    /// tol.  Throws num::tolerance_error when that cannot be done within the
    /// brute-force budget for this (p, alpha, s).
    static OracleConfig automatic(long p, const Rational& alpha, const PicParam& s,
                                  double tol, bool with_character);
};

/**
 * Local height transform at a finite place by direct shell summation:
 *   sum over valuation shells of x and a of
 *     (shell measure) * (unit average of the character at alpha * x)
 *     * H_p(s, (x, a))^{-1} * |a|_p^{i t}
 * with every unit average brute-forced over residues and rigorous geometric
 * bounds for all truncated directions.  Deliberately shares no algebra with
 * hhat_p_closed.  Requires Re(s0) > -1, Re(s0+s2) > 1, Re(2s0+s2) > 0.
 */
LocalTransform hhat_p_oracle(const PicParam& s, const Rational& alpha, long p,
                             const OracleConfig& cfg, double t = 0.0);

/// Closed form of the same transform, by the evaluated lemmas:
///   v_p(alpha) = 0:  zeta_p(s0+1) zeta_p(2 s0+s2) / zeta_p(s0+s2)
///   v_p(alpha) < 0:  p^{v(s0+1)} times the above
///   v_p(alpha) > 0:  explicit rational function recorded below in
///                    hhat_p_closed_exact.
/// Throws std::domain_error outside Re(s0) > -1+eps, Re(s0+s2) > eps,
/// Re(2 s0+s2) > eps.
Complex hhat_p_closed(const PicParam& s, const Rational& alpha, long p);

/// Transform with the extra multiplicative twist |a|_p^{it}.  Because
/// |a| equals the ratio of the two local height factors, this is the closed
/// form evaluated at the shifted parameter (s0 + it, s2 - it).
Complex hhat_p_twisted(const PicParam& s, const Rational& alpha, double t, long p);

/// Exact rational-function form of hhat_p_closed at X = p^{-s0}, Y = p^{-s2}
/// (so the scaling identity in v_p(alpha) can be tested with zero tolerance).
/// v_alpha is the valuation of alpha at p.
Rational hhat_p_closed_exact(long p, long v_alpha, const Rational& X, const Rational& Y);

/**
 * The transform at trivial character (no oscillation), evaluated through the
 * boundary stratification of a model:
 *   (1/tau_p) * sum over strata I of #stratum(F_p)/p^dim *
 *       prod_{divisor in I} (p-1) / (p^{s_i - kappa_i + 1} - 1)
 * with tau_p the local Tamagawa density.  Throws std::domain_error on the
 * pole hyperplanes Re(s_i - kappa_i) <= -1.
 */
Complex trivial_integral_p(const geom::VarietyModel& model, const PicParam& s, long p);

/// Same value in exact rational arithmetic for integer shifts
/// s_i - kappa_i >= 0 (zero tolerance in identity tests).
Rational trivial_integral_exact(const geom::VarietyModel& model, long p,
                                long s0_minus_k0, long s2_minus_k2);

/// No-character shell-sum oracle for trivial_integral_p (independent of the
/// stratification formula).  Same convergence requirements as hhat_p_oracle
/// plus Re(s2) > 2 for the deep-a tail.
LocalTransform trivial_integral_oracle(const PicParam& s, long p, const OracleConfig& cfg);

}  // namespace hzeta::fourier
