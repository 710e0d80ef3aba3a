#pragma once

#include <complex>
#include <limits>
#include <vector>

#include "hzeta/rational.hpp"

namespace hzeta::arith {

using Complex = std::complex<double>;

/// Sentinel valuation of zero (v_p(0) = +infinity).
inline constexpr long val_infinity = std::numeric_limits<long>::max();

/// A place of Q: either a finite prime p or the archimedean place.
struct Place {
    bool archimedean = false;
    long p = 0;  // the prime, meaningful only when !archimedean

    static Place infinite() { return Place{true, 0}; }
    static Place finite(long p);
};

/// p-adic valuation of a rational; val_infinity for q == 0.  p must be prime.
long padic_valuation(const Rational& q, long p);

/// |q|_p = p^{-v_p(q)} as an exact rational; 0 for q == 0.
Rational padic_abs(const Rational& q, long p);

/// The unique r in [0,1) with p-power denominator such that q - r is a
/// p-adic integer (the "p-adic fractional part").  Zero when v_p(q) >= 0.
Rational padic_fractional_part(const Rational& q, long p);

/// Standard additive character of Q_v restricted to Q:
///   finite p:  psi_p(q) = exp(2*pi*i*{q}_p)
///   real place: psi_oo(q) = exp(-2*pi*i*q)
/// The product over all places of psi_v(q) is 1 for every rational q.
Complex additive_character(const Rational& q, const Place& v);

/// Local zeta factor zeta_p(s) = 1/(1 - p^{-s}).  Throws std::domain_error
/// when p^{-s} is (numerically) 1, i.e. on the pole locus.
double local_zeta(double s, long p);
Complex local_zeta(Complex s, long p);

/// Truncated Euler product for the Riemann zeta function, s real > 1:
/// value = prod_{p <= prime_cutoff} (1-p^{-s})^{-1}, together with a rigorous
/// upper bound for |zeta(s) - value|.
struct ZetaTruncated {
    double value = 0;
    double error_bound = 0;
};
ZetaTruncated riemann_zeta_truncated(double s, long prime_cutoff);

/// Riemann zeta by Borwein's alternating-series acceleration.  Accurate to
/// ~1e-12 for Re(s) >= 0.4 away from s = 1 (and from the zeros of
/// 1 - 2^{1-s}, which on Re(s) != 1 are absent).  Suitable for contour
/// evaluation with |Im(s)| up to a few hundred.
Complex zeta_analytic(Complex s);

/// All primes <= n, by sieve of Eratosthenes.
std::vector<long> primes_up_to(long n);

/// Deterministic primality test for 64-bit range.
bool is_prime(long n);

/// Distinct primes dividing a nonzero integer (trial division + Pollard rho).
std::vector<long> prime_support(const mpz_class& n);

/// Distinct primes dividing numerator or denominator of a nonzero rational.
std::vector<long> prime_support(const Rational& q);

}  // namespace hzeta::arith
