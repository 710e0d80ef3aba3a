#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <set>

#include "hzeta/arith.hpp"
#include "hzeta/rational.hpp"

using namespace hzeta;
using arith::Complex;

namespace {

// Small random rationals with a reproducible generator, for property tests.
Rational random_rational(std::mt19937& rng, long span = 60) {
    std::uniform_int_distribution<long> num(-span, span);
    std::uniform_int_distribution<long> den(1, span);
    return Rational(num(rng), den(rng));
}

}  // namespace

// ===========================================================================
// rational numbers
// ===========================================================================

TEST_CASE("rationals canonicalize and parse") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(-3, -6) == Rational(1, 2));
    CHECK(Rational(3, -6) == Rational(-1, 2));
    CHECK(Rational(3, -6).den() == 2);  // denominator kept positive
    CHECK(Rational(0, 17) == Rational(0));

    CHECK(Rational::parse("7") == Rational(7));
    CHECK(Rational::parse("-4/8") == Rational(-1, 2));
    CHECK(Rational::parse("10/5") == Rational(2));
    CHECK(Rational::parse("1/27").den() == 27);
    CHECK_THROWS_AS(Rational::parse("x/2"), std::invalid_argument);
    CHECK_THROWS_AS(Rational::parse(""), std::invalid_argument);
    CHECK_THROWS(Rational::parse("1/0"));
}

TEST_CASE("rational arithmetic and powers") {
    Rational q(2, 3);
    CHECK(q + q == Rational(4, 3));
    CHECK(q * Rational(3, 2) == Rational(1));
    CHECK((q / Rational(1, 6)) == Rational(4));
    CHECK(q.inverse() == Rational(3, 2));
    CHECK(q.pow(0) == Rational(1));
    CHECK(q.pow(3) == Rational(8, 27));
    CHECK(q.pow(-2) == Rational(9, 4));
    CHECK((-q).abs() == q);
    CHECK(Rational(-5, 3).sign() == -1);
    CHECK(Rational(7, 2).str() == "7/2");
    CHECK(Rational(-4).str() == "-4");
}

// ===========================================================================
// p-adic valuations, absolute values, fractional parts
// ===========================================================================

TEST_CASE("p-adic valuation on integers and fractions") {
    CHECK(arith::padic_valuation(Rational(12), 2) == 2);
    CHECK(arith::padic_valuation(Rational(12), 3) == 1);
    CHECK(arith::padic_valuation(Rational(12), 5) == 0);
    CHECK(arith::padic_valuation(Rational(3, 8), 2) == -3);
    CHECK(arith::padic_valuation(Rational(9, 10), 3) == 2);
    CHECK(arith::padic_valuation(Rational(0), 7) == arith::val_infinity);
}

TEST_CASE("p-adic absolute value is exact and multiplicative") {
    CHECK(arith::padic_abs(Rational(12), 2) == Rational(1, 4));
    CHECK(arith::padic_abs(Rational(3, 8), 2) == Rational(8));
    CHECK(arith::padic_abs(Rational(0), 5) == Rational(0));

    std::mt19937 rng(20260815);
    for (int trial = 0; trial < 200; ++trial) {
        Rational a = random_rational(rng), b = random_rational(rng);
        for (long p : {2L, 3L, 5L}) {
            CHECK(arith::padic_abs(a * b, p) ==
                  arith::padic_abs(a, p) * arith::padic_abs(b, p));
            // ultrametric inequality
            Rational lhs = arith::padic_abs(a + b, p);
            Rational rhs = std::max(arith::padic_abs(a, p), arith::padic_abs(b, p));
            CHECK(lhs <= rhs);
        }
    }
}

TEST_CASE("p-adic fractional part splits off the integral part") {
    CHECK(arith::padic_fractional_part(Rational(1, 8), 2) == Rational(1, 8));
    CHECK(arith::padic_fractional_part(Rational(7, 3), 3) == Rational(1, 3));
    CHECK(arith::padic_fractional_part(Rational(7, 3), 2) == Rational(0));
    CHECK(arith::padic_fractional_part(Rational(5, 6), 3) == Rational(1, 3));
    CHECK(arith::padic_fractional_part(Rational(42), 5) == Rational(0));

    std::mt19937 rng(987);
    for (int trial = 0; trial < 200; ++trial) {
        Rational q = random_rational(rng, 200);
        for (long p : {2L, 3L, 7L}) {
            Rational r = arith::padic_fractional_part(q, p);
            CHECK(r >= Rational(0));
            CHECK(r < Rational(1));
            // r has p-power denominator and q - r is a p-adic integer
            if (!r.is_zero()) {
                mpz_class den = r.den();
                while (den % p == 0) den /= p;
                CHECK(den == 1);
            }
            if (q != r) CHECK(arith::padic_valuation(q - r, p) >= 0);
        }
    }
}

// ===========================================================================
// additive characters
// ===========================================================================

TEST_CASE("additive characters: local values and global product formula") {
    auto p2 = arith::Place::finite(2);
    auto inf = arith::Place::infinite();

    // psi_p is trivial on p-adic integers
    CHECK(std::abs(arith::additive_character(Rational(5), p2) - Complex(1, 0)) < 1e-15);
    CHECK(std::abs(arith::additive_character(Rational(3, 5), p2) - Complex(1, 0)) < 1e-15);
    // psi_2(1/2) = exp(pi i) = -1
    CHECK(std::abs(arith::additive_character(Rational(1, 2), p2) - Complex(-1, 0)) < 1e-14);
    // psi_oo(1/4) = exp(-pi i / 2) = -i
    CHECK(std::abs(arith::additive_character(Rational(1, 4), inf) - Complex(0, -1)) < 1e-14);

    std::mt19937 rng(5150);
    for (int trial = 0; trial < 100; ++trial) {
        Rational q = random_rational(rng, 90);
        // additivity at each place
        Rational r = random_rational(rng, 90);
        for (auto v : {arith::Place::finite(3), inf}) {
            Complex lhs = arith::additive_character(q + r, v);
            Complex rhs = arith::additive_character(q, v) * arith::additive_character(r, v);
            CHECK(std::abs(lhs - rhs) < 1e-12);
        }
        // product over all places is 1
        if (q.is_zero()) continue;
        Complex prod = arith::additive_character(q, inf);
        for (long p : arith::prime_support(q))
            prod *= arith::additive_character(q, arith::Place::finite(p));
        CHECK(std::abs(prod - Complex(1, 0)) < 1e-12);
    }
}

TEST_CASE("product formula for absolute values") {
    std::mt19937 rng(31415);
    for (int trial = 0; trial < 200; ++trial) {
        Rational q = random_rational(rng, 120);
        if (q.is_zero()) continue;
        Rational prod = q.abs();  // the archimedean absolute value, exactly
        for (long p : arith::prime_support(q)) prod *= arith::padic_abs(q, p);
        CHECK(prod == Rational(1));
    }
}

// ===========================================================================
// local and global zeta values
// ===========================================================================

TEST_CASE("local zeta factors") {
    CHECK(arith::local_zeta(1.0, 2) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(arith::local_zeta(2.0, 3) == doctest::Approx(9.0 / 8.0).epsilon(1e-14));
    CHECK_THROWS_AS(arith::local_zeta(0.0, 2), std::domain_error);

    Complex z = arith::local_zeta(Complex(2.0, 0.0), 3);
    CHECK(std::abs(z - Complex(9.0 / 8.0, 0)) < 1e-14);
    // complex value against the direct formula
    Complex s(1.5, 2.0);
    Complex direct = 1.0 / (1.0 - std::exp(-s * std::log(3.0)));
    CHECK(std::abs(arith::local_zeta(s, 3) - direct) < 1e-13);
}

TEST_CASE("truncated Euler product brackets the zeta value") {
    const double zeta2 = M_PI * M_PI / 6.0;
    auto t = arith::riemann_zeta_truncated(2.0, 10000);
    CHECK(std::abs(t.value - zeta2) <= t.error_bound);
    CHECK(t.error_bound < 1e-3);

    // tighter cutoff, larger bound, still bracketing
    auto loose = arith::riemann_zeta_truncated(2.0, 50);
    CHECK(loose.error_bound > t.error_bound);
    CHECK(std::abs(loose.value - zeta2) <= loose.error_bound);

    // s = 3 against a directly summed reference with integral tail bound
    double direct = 0.0;
    for (long n = 200000; n >= 1; --n) direct += 1.0 / (double(n) * n * n);
    double tail_hi = 1.0 / (2.0 * 200000.0 * 200000.0);
    auto t3 = arith::riemann_zeta_truncated(3.0, 20000);
    CHECK(std::abs(t3.value - direct) <= t3.error_bound + tail_hi);

    CHECK_THROWS_AS(arith::riemann_zeta_truncated(1.0, 100), std::domain_error);
}

TEST_CASE("analytic zeta continuation") {
    const double zeta2 = M_PI * M_PI / 6.0;
    CHECK(std::abs(arith::zeta_analytic(Complex(2, 0)) - Complex(zeta2, 0)) < 1e-10);

    // agreement with the Euler product where both converge
    for (double sigma : {2.5, 4.0}) {
        auto t = arith::riemann_zeta_truncated(sigma, 100000);
        CHECK(std::abs(arith::zeta_analytic(Complex(sigma, 0)).real() - t.value) <=
              t.error_bound + 1e-10);
    }

    // vanishes at the first zero on the critical line
    Complex first_zero(0.5, 14.134725141734694);
    CHECK(std::abs(arith::zeta_analytic(first_zero)) < 1e-6);

    // reflection s -> conj(s)
    Complex s(1.3, 7.7);
    CHECK(std::abs(arith::zeta_analytic(std::conj(s)) - std::conj(arith::zeta_analytic(s))) <
          1e-10);
}

// ===========================================================================
// primes
// ===========================================================================

TEST_CASE("prime sieve, primality, and support") {
    CHECK(arith::primes_up_to(30) ==
          std::vector<long>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
    CHECK(arith::primes_up_to(1) == std::vector<long>{});

    CHECK(arith::is_prime(2));
    CHECK(arith::is_prime(3));
    CHECK_FALSE(arith::is_prime(1));
    CHECK_FALSE(arith::is_prime(0));
    CHECK_FALSE(arith::is_prime(1000005));
    CHECK(arith::is_prime(1000003));
    CHECK(arith::is_prime(2147483647));            // 2^31 - 1
    CHECK(arith::is_prime(2305843009213693951L));  // 2^61 - 1
    CHECK_FALSE(arith::is_prime(2305843009213693953L));

    CHECK(arith::prime_support(mpz_class(360)) == std::vector<long>{2, 3, 5});
    CHECK(arith::prime_support(mpz_class(-17)) == std::vector<long>{17});
    CHECK(arith::prime_support(Rational(9, 10)) == std::vector<long>{2, 3, 5});
    // a semiprime large enough to exercise the rho splitter
    mpz_class semi = mpz_class(1000003) * mpz_class(1000033);
    CHECK(arith::prime_support(semi) == std::vector<long>{1000003, 1000033});
}
