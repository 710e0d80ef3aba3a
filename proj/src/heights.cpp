#include "hzeta/heights.hpp"

#include <cmath>
#include <stdexcept>

namespace hzeta::heights {

GroupPoint group_identity() { return GroupPoint{Rational(0), Rational(1)}; }

GroupPoint group_mul(const GroupPoint& g, const GroupPoint& h) {
    if (g.a.is_zero() || h.a.is_zero()) throw std::domain_error("group_mul: a = 0 is not a group point");
    return GroupPoint{g.x + g.a * h.x, g.a * h.a};
}

GroupPoint group_inv(const GroupPoint& g) {
    if (g.a.is_zero()) throw std::domain_error("group_inv: a = 0 is not a group point");
    const Rational ainv = g.a.inverse();
    return GroupPoint{-(ainv * g.x), ainv};
}

namespace {

Rational rational_max3(const Rational& a, const Rational& b, const Rational& c) {
    return std::max(std::max(a, b), c);
}

}  // namespace

Rational local_height_a_pole(long p, const GroupPoint& g) {
    if (g.a.is_zero()) throw std::domain_error("local height: a = 0");
    using arith::padic_abs;
    return rational_max3(padic_abs(g.a, p), padic_abs(g.x / g.a, p), Rational(1));
}

Rational local_height_a_zero(long p, const GroupPoint& g) {
    return local_height_a_pole(p, g) / arith::padic_abs(g.a, p);
}

double local_height_a_pole_arch(const GroupPoint& g) {
    if (g.a.is_zero()) throw std::domain_error("local height: a = 0");
    const double a = g.a.to_double();
    const double y = (g.x / g.a).to_double();
    return std::sqrt(a * a + y * y + 1.0);
}

double local_height_a_zero_arch(const GroupPoint& g) {
    return local_height_a_pole_arch(g) / std::abs(g.a.to_double());
}

Complex local_height(const Place& v, const PicParam& s, const GroupPoint& g) {
    double h0, h2;
    if (v.archimedean) {
        h0 = local_height_a_zero_arch(g);
        h2 = local_height_a_pole_arch(g);
    } else {
        h0 = local_height_a_zero(v.p, g).to_double();
        h2 = local_height_a_pole(v.p, g).to_double();
    }
    return std::exp(s.s0 * std::log(h0) + s.s2 * std::log(h2));
}

Complex global_height(const PicParam& s, const GroupPoint& g) {
    if (g.a.is_zero()) throw std::domain_error("global_height: a = 0");
    Complex value = local_height(Place::infinite(), s, g);
    std::vector<long> support = arith::prime_support(g.a);
    if (!g.x.is_zero()) {
        for (long p : arith::prime_support(g.x)) support.push_back(p);
        std::sort(support.begin(), support.end());
        support.erase(std::unique(support.begin(), support.end()), support.end());
    }
    for (long p : support) value *= local_height(Place::finite(p), s, g);
    return value;
}

PrimitiveTriple to_primitive_triple(const GroupPoint& g) {
    if (g.a.is_zero()) throw std::domain_error("to_primitive_triple: a = 0");
    // (a : a^{-1} x : 1) = (a^2 : x : a); clear denominators and divide by
    // the content.  The first coordinate is a square times a positive
    // integer, so the canonical representative automatically has u0 >= 1.
    const Rational a2 = g.a * g.a;
    mpz_class lcd;
    mpz_lcm(lcd.get_mpz_t(), a2.den().get_mpz_t(), g.x.den().get_mpz_t());
    mpz_lcm(lcd.get_mpz_t(), lcd.get_mpz_t(), g.a.den().get_mpz_t());
    PrimitiveTriple t;
    t.u0 = a2.num() * (lcd / a2.den());
    t.u1 = g.x.num() * (lcd / g.x.den());
    t.u2 = g.a.num() * (lcd / g.a.den());
    mpz_class content;
    mpz_gcd(content.get_mpz_t(), t.u0.get_mpz_t(), t.u1.get_mpz_t());
    mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), t.u2.get_mpz_t());
    t.u0 /= content;
    t.u1 /= content;
    t.u2 /= content;
    return t;
}

GroupPoint from_primitive_triple(const PrimitiveTriple& t) {
    if (t.u0 == 0 || t.u2 == 0)
        throw std::domain_error("from_primitive_triple: point lies outside the group image");
    return GroupPoint{Rational(t.u0 * t.u1, t.u2 * t.u2), Rational(t.u0, t.u2)};
}

double anticanonical_height(const PrimitiveTriple& t) {
    const mpz_class n = t.u0 * t.u0 + t.u1 * t.u1 + t.u2 * t.u2;
    return std::pow(n.get_d(), 1.5);
}

double anticanonical_height(const GroupPoint& g) { return anticanonical_height(to_primitive_triple(g)); }

}  // namespace hzeta::heights
