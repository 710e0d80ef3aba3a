#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "hzeta/rational.hpp"

namespace hzeta::geom {

/// Whether the group coordinate `a` vanishes or blows up along a boundary
/// divisor (equivalently, the sign of its multiplicity in div(a)).
enum class DivisorKind { a_zero, a_pole };

/**
 * One boundary divisor of the compactification, together with the combinatorial
 * data the local integrals consume:
 *   d       multiplicity in the log-anticanonical class (kappa-coefficient)
 *   e       pole order of the unipotent coordinate x along the divisor
 *   a_mult  multiplicity of the divisor in div(a) (+1 zero, -1 pole)
 */
struct BoundaryDivisor {
    std::string label;
    long d = 0;
    long e = 0;
    long a_mult = 0;
    DivisorKind kind = DivisorKind::a_zero;
};

/// Full-dimensional simplicial cone given by integer generators (rows).
struct SimplicialCone {
    std::vector<std::vector<long>> generators;
};

/// A boundary stratum: the (sorted) indices of the divisors containing it and
/// the polynomial in q counting its F_q-points (coefficients in ascending
/// degree order).
struct Stratum {
    std::vector<int> divisors;
    std::vector<long> point_count;
};

/**
 * Combinatorial model of an equivariant compactification of the ax+b group:
 * boundary divisors indexing the equivariant Picard basis, the
 * log-anticanonical class, the image of the multiplicative character in that
 * basis, the projection to the geometric Picard group, and the boundary
 * stratification with point counts.
 */
struct VarietyModel {
    std::string name;
    long dim = 2;
    long picard_rank = 1;
    std::vector<BoundaryDivisor> divisors;
    std::vector<long> kappa;                          // log-anticanonical class
    std::vector<long> character_class;                // class of div(a)
    std::vector<std::vector<long>> picard_projection; // rank x #divisors matrix
    std::vector<Stratum> strata;                      // all boundary strata incl. open orbit
    std::vector<long> total_point_count;              // #X(F_q) as polynomial in q
};

/// The plane, compactifying the group via (x, a) -> (a : a^{-1} x : 1).
VarietyModel builtin_plane_model();

struct ValidationReport {
    std::vector<std::string> violations;  // hard inconsistencies
    std::vector<std::string> warnings;    // soft model-assumption flags
    bool ok() const { return violations.empty(); }
};

/// Consistency checks: reduced div(a), pole orders of x on a-pole divisors,
/// stratum point counts summing to the total, character class projecting to
/// zero, shape of kappa/projection.  Positivity of the kappa-coefficients is
/// reported as a warning, not a violation.
ValidationReport validate_model(const VarietyModel& model);

/// Evaluate a point-count polynomial at q.
long evaluate_point_count(const std::vector<long>& poly, long q);

/**
 * Integral of exp(-<s,y>) over the dual cone of a full-dimensional simplicial
 * cone: equals 1/|det G| * prod_i 1/c_i where c = G^{-1} s are the coordinates
 * of s in the basis dual to the generators.  Throws std::domain_error when s
 * is not strictly inside the generated cone (some c_i <= 0) and
 * std::invalid_argument for a degenerate generator matrix.
 */
double cone_laplace(const SimplicialCone& cone, const std::vector<double>& s);

/// Local Tamagawa density of the open orbit: #G(F_p) / p^dim, exactly.
Rational tamagawa_local_density(const VarietyModel& model, long p);

nlohmann::ordered_json model_to_json(const VarietyModel& model);
VarietyModel model_from_json(const nlohmann::ordered_json& j);

}  // namespace hzeta::geom
