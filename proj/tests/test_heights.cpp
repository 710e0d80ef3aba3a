#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "hzeta/heights.hpp"

using namespace hzeta;
using heights::GroupPoint;
using heights::PicParam;
using heights::PrimitiveTriple;
using arith::Complex;
using arith::Place;

namespace {

GroupPoint random_point(std::mt19937& rng, long span = 20) {
    std::uniform_int_distribution<long> num(-span, span);
    std::uniform_int_distribution<long> den(1, span);
    Rational a(0);
    while (a.is_zero()) a = Rational(num(rng), den(rng));
    return GroupPoint{Rational(num(rng), den(rng)), a};
}

}  // namespace

// ===========================================================================
// group law
// ===========================================================================

TEST_CASE("semidirect-product group law") {
    GroupPoint e = heights::group_identity();
    CHECK(e.x == Rational(0));
    CHECK(e.a == Rational(1));

    GroupPoint g{Rational(1, 2), Rational(3)};
    GroupPoint h{Rational(2), Rational(1, 5)};
    GroupPoint gh = heights::group_mul(g, h);
    CHECK(gh.x == Rational(1, 2) + Rational(3) * Rational(2));  // x1 + a1 x2
    CHECK(gh.a == Rational(3, 5));

    // associativity and inverses on random points
    std::mt19937 rng(777);
    for (int trial = 0; trial < 100; ++trial) {
        GroupPoint u = random_point(rng), v = random_point(rng), w = random_point(rng);
        GroupPoint lhs = heights::group_mul(heights::group_mul(u, v), w);
        GroupPoint rhs = heights::group_mul(u, heights::group_mul(v, w));
        CHECK(lhs.x == rhs.x);
        CHECK(lhs.a == rhs.a);
        GroupPoint uinv = heights::group_inv(u);
        GroupPoint id = heights::group_mul(u, uinv);
        CHECK(id.x == Rational(0));
        CHECK(id.a == Rational(1));
    }
}

// ===========================================================================
// local height factors: pinned exact values
// ===========================================================================

TEST_CASE("finite local height factors at hand-checked points") {
    // g = (1, 1/2) at p = 2: |a|_2 = 2, |x/a|_2 = 1/2, so the a-pole factor is
    // max(2, 1/2, 1) = 2 and the a-zero factor is 2 / |a|_2 = 1.
    GroupPoint g{Rational(1), Rational(1, 2)};
    CHECK(heights::local_height_a_pole(2, g) == Rational(2));
    CHECK(heights::local_height_a_zero(2, g) == Rational(1));

    // same point at p = 3: everything is a unit, both factors are 1
    CHECK(heights::local_height_a_pole(3, g) == Rational(1));
    CHECK(heights::local_height_a_zero(3, g) == Rational(1));

    // g = (0, 9) at p = 3: |a|_3 = 1/9, pole factor max(1/9, 0, 1) = 1,
    // zero factor 1/|a| = 9
    GroupPoint h{Rational(0), Rational(9)};
    CHECK(heights::local_height_a_pole(3, h) == Rational(1));
    CHECK(heights::local_height_a_zero(3, h) == Rational(9));

    // H_p(s, g) with both exponents: p = 3, s = (1,1), g = (0,1) is integral
    Complex hp = heights::local_height(Place::finite(3), PicParam{1.0, 1.0},
                                       GroupPoint{Rational(0), Rational(1)});
    CHECK(std::abs(hp - Complex(1, 0)) < 1e-15);
}

TEST_CASE("archimedean local height factors") {
    // g = (0, 1): norm sqrt(1 + 0 + 1) = sqrt(2)
    GroupPoint g{Rational(0), Rational(1)};
    CHECK(heights::local_height_a_pole_arch(g) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(heights::local_height_a_zero_arch(g) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    // the anticanonical exponent (0,3) turns the norm into norm^3
    CHECK(heights::anticanonical_height(g) == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-13));

    // zero factor carries the extra 1/|a|
    GroupPoint h{Rational(2), Rational(4)};
    double norm = std::sqrt(16.0 + 0.25 + 1.0);
    CHECK(heights::local_height_a_pole_arch(h) == doctest::Approx(norm).epsilon(1e-13));
    CHECK(heights::local_height_a_zero_arch(h) == doctest::Approx(norm / 4.0).epsilon(1e-13));
}

// ===========================================================================
// global and anticanonical heights
// ===========================================================================

TEST_CASE("anticanonical height equals the primitive-coordinate norm cubed") {
    auto expect = [](long u0, long u1, long u2) {
        double n2 = double(u0) * u0 + double(u1) * u1 + double(u2) * u2;
        return std::pow(n2, 1.5);
    };
    CHECK(heights::anticanonical_height(GroupPoint{Rational(0), Rational(1)}) ==
          doctest::Approx(expect(1, 0, 1)).epsilon(1e-12));
    CHECK(heights::anticanonical_height(GroupPoint{Rational(1), Rational(1)}) ==
          doctest::Approx(expect(1, 1, 1)).epsilon(1e-12));
    CHECK(heights::anticanonical_height(GroupPoint{Rational(3), Rational(2)}) ==
          doctest::Approx(expect(4, 3, 2)).epsilon(1e-12));
    CHECK(heights::anticanonical_height(GroupPoint{Rational(4), Rational(2)}) ==
          doctest::Approx(27.0).epsilon(1e-12));  // (4:4:2) -> (2:2:1)
    CHECK(heights::anticanonical_height(GroupPoint{Rational(1, 2), Rational(1, 3)}) ==
          doctest::Approx(expect(2, 9, 6)).epsilon(1e-12));

    CHECK(heights::anticanonical_height(PrimitiveTriple{4, 3, 2}) ==
          doctest::Approx(expect(4, 3, 2)).epsilon(1e-12));
}

TEST_CASE("global height at the anticanonical parameter matches the direct formula") {
    std::mt19937 rng(2024);
    PicParam kappa{0.0, 3.0};
    for (int trial = 0; trial < 50; ++trial) {
        GroupPoint g = random_point(rng);
        Complex global = heights::global_height(kappa, g);
        double direct = heights::anticanonical_height(g);
        CHECK(std::abs(global.imag()) < 1e-10 * direct);
        CHECK(global.real() == doctest::Approx(direct).epsilon(1e-9));
    }
}

// ===========================================================================
// primitive coordinates
// ===========================================================================

TEST_CASE("clearing to primitive triples") {
    auto t1 = heights::to_primitive_triple(GroupPoint{Rational(0), Rational(1)});
    CHECK(t1.u0 == 1);
    CHECK(t1.u1 == 0);
    CHECK(t1.u2 == 1);

    auto t2 = heights::to_primitive_triple(GroupPoint{Rational(3), Rational(2)});
    CHECK(t2.u0 == 4);
    CHECK(t2.u1 == 3);
    CHECK(t2.u2 == 2);

    auto t3 = heights::to_primitive_triple(GroupPoint{Rational(1, 2), Rational(1, 3)});
    CHECK(t3.u0 == 2);
    CHECK(t3.u1 == 9);
    CHECK(t3.u2 == 6);

    // u0 >= 1 normalization on negative a
    auto t4 = heights::to_primitive_triple(GroupPoint{Rational(3), Rational(-2)});
    CHECK(t4.u0 == 4);
    CHECK(t4.u1 == 3);
    CHECK(t4.u2 == -2);
}

TEST_CASE("primitive triples round-trip through the group chart") {
    std::mt19937 rng(90210);
    for (int trial = 0; trial < 200; ++trial) {
        GroupPoint g = random_point(rng);
        PrimitiveTriple t = heights::to_primitive_triple(g);

        // invariants of the representative
        CHECK(t.u0 > 0);
        CHECK(t.u2 != 0);
        mpz_class d = gcd(gcd(t.u0, t.u1), t.u2);
        CHECK(d == 1);

        GroupPoint back = heights::from_primitive_triple(t);
        CHECK(back.x == g.x);
        CHECK(back.a == g.a);
    }
}

// ===========================================================================
// invariance properties
// ===========================================================================

TEST_CASE("finite local heights are right-invariant under the integral compact") {
    std::mt19937 rng(555);
    for (long p : {2L, 3L, 5L}) {
        std::uniform_int_distribution<long> small(-30, 30);
        for (int trial = 0; trial < 100; ++trial) {
            GroupPoint g = random_point(rng);
            // k = (xk, ak) with xk p-integral and ak a p-unit
            long d = 1 + std::abs(small(rng));
            while (d % p == 0) ++d;
            Rational xk(small(rng), d);
            long anum = small(rng), aden = 1 + std::abs(small(rng));
            while (anum == 0 || anum % p == 0) ++anum;
            while (aden % p == 0) ++aden;
            GroupPoint k{xk, Rational(anum, aden)};
            GroupPoint gk = heights::group_mul(g, k);

            CHECK(heights::local_height_a_pole(p, gk) == heights::local_height_a_pole(p, g));
            CHECK(heights::local_height_a_zero(p, gk) == heights::local_height_a_zero(p, g));
        }
    }
}

TEST_CASE("archimedean height is invariant under the sign compact") {
    std::mt19937 rng(556);
    GroupPoint flip{Rational(0), Rational(-1)};
    for (int trial = 0; trial < 100; ++trial) {
        GroupPoint g = random_point(rng);
        GroupPoint gf = heights::group_mul(g, flip);
        CHECK(heights::local_height_a_pole_arch(gf) ==
              doctest::Approx(heights::local_height_a_pole_arch(g)).epsilon(1e-13));
        CHECK(heights::local_height_a_zero_arch(gf) ==
              doctest::Approx(heights::local_height_a_zero_arch(g)).epsilon(1e-13));
        CHECK(heights::anticanonical_height(gf) ==
              doctest::Approx(heights::anticanonical_height(g)).epsilon(1e-12));
    }
}

TEST_CASE("complex height parameter splits multiplicatively over the factors") {
    GroupPoint g{Rational(5, 3), Rational(7, 4)};
    PicParam s{Complex(0.7, 0.3), Complex(1.9, -0.4)};
    for (long p : {2L, 3L, 5L, 7L}) {
        Complex combined = heights::local_height(Place::finite(p), s, g);
        double fz = heights::local_height_a_zero(p, g).to_double();
        double fp = heights::local_height_a_pole(p, g).to_double();
        Complex manual = std::exp(s.s0 * std::log(fz) + s.s2 * std::log(fp));
        CHECK(std::abs(combined - manual) < 1e-12 * std::abs(manual));
    }
    Complex arch = heights::local_height(Place::infinite(), s, g);
    Complex manual = std::exp(s.s0 * std::log(heights::local_height_a_zero_arch(g)) +
                              s.s2 * std::log(heights::local_height_a_pole_arch(g)));
    CHECK(std::abs(arch - manual) < 1e-12 * std::abs(manual));
}
