#pragma once

#include <complex>

#include "hzeta/arith.hpp"
#include "hzeta/rational.hpp"

namespace hzeta::heights {

using arith::Complex;
using arith::Place;

/// A rational point (x, a) of the group G = { (x, a) : a != 0 } with law
/// (x1, a1) * (x2, a2) = (x1 + a1 * x2, a1 * a2).
struct GroupPoint {
    Rational x;
    Rational a;
};

GroupPoint group_identity();
GroupPoint group_mul(const GroupPoint& g, const GroupPoint& h);
GroupPoint group_inv(const GroupPoint& g);

/// Complexified equivariant Picard parameter, components along the two
/// boundary divisors (s0 on the a-zero divisor, s2 on the a-pole divisor).
struct PicParam {
    Complex s0;
    Complex s2;
};

/// Primitive integer coordinates (u0 : u1 : u2) of the image of a group
/// point in the plane, normalized so gcd = 1 and u0 >= 1.
struct PrimitiveTriple {
    mpz_class u0, u1, u2;
};

/// Exact local height factors at a finite place:
///   height against the a-pole divisor:  max(|a|_p, |a^{-1}x|_p, 1)
///   height against the a-zero divisor:  the same maximum divided by |a|_p
Rational local_height_a_pole(long p, const GroupPoint& g);
Rational local_height_a_zero(long p, const GroupPoint& g);

/// Archimedean counterparts built from the l2 norm sqrt(a^2 + (x/a)^2 + 1).
double local_height_a_pole_arch(const GroupPoint& g);
double local_height_a_zero_arch(const GroupPoint& g);

/// H_v(s, g) = (a-zero factor)^{s0} * (a-pole factor)^{s2} at the place v.
Complex local_height(const Place& v, const PicParam& s, const GroupPoint& g);

/// Product of local_height over the archimedean place and every finite place
/// (only finitely many factors differ from 1).
Complex global_height(const PicParam& s, const GroupPoint& g);

/// Anticanonical height: global height at s = kappa = (0, 3); equals
/// (u0^2 + u1^2 + u2^2)^{3/2} on the primitive coordinates.
double anticanonical_height(const GroupPoint& g);
double anticanonical_height(const PrimitiveTriple& t);

/// Clear denominators of (a : a^{-1} x : 1) to primitive integer coordinates
/// with u0 >= 1.  Requires a != 0.
PrimitiveTriple to_primitive_triple(const GroupPoint& g);

/// Inverse of to_primitive_triple: g = (u0*u1/u2^2, u0/u2).  Requires
/// u0 != 0 and u2 != 0 (the triple lies in the image of the group).
GroupPoint from_primitive_triple(const PrimitiveTriple& t);

}  // namespace hzeta::heights
