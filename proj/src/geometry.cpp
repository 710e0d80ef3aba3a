#include "hzeta/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hzeta::geom {

namespace {

std::string kind_name(DivisorKind k) { return k == DivisorKind::a_zero ? "a_zero" : "a_pole"; }

DivisorKind kind_from_name(const std::string& s) {
    if (s == "a_zero") return DivisorKind::a_zero;
    if (s == "a_pole") return DivisorKind::a_pole;
    throw std::invalid_argument("unknown divisor kind '" + s + "'");
}

}  // namespace

VarietyModel builtin_plane_model() {
    VarietyModel m;
    m.name = "plane";
    m.dim = 2;
    m.picard_rank = 1;
    // Embedding (x, a) -> (a : a^{-1} x : 1).  The divisor where a vanishes
    // is the line u0 = 0; the divisor where a blows up is the line u2 = 0.
    m.divisors = {
        BoundaryDivisor{"a=0", 0, 0, +1, DivisorKind::a_zero},
        BoundaryDivisor{"a=oo", 3, 2, -1, DivisorKind::a_pole},
    };
    m.kappa = {0, 3};
    m.character_class = {1, -1};
    m.picard_projection = {{1, 1}};
    m.strata = {
        Stratum{{}, {0, -1, 1}},      // open orbit: q^2 - q points
        Stratum{{0}, {0, 1}},         // a = 0 line minus the torus fixed points
        Stratum{{1}, {0, 1}},         // a = oo line minus the fixed points
        Stratum{{0, 1}, {1}},         // the intersection point
    };
    m.total_point_count = {1, 1, 1};  // q^2 + q + 1
    return m;
}

long evaluate_point_count(const std::vector<long>& poly, long q) {
    long value = 0;
    for (size_t i = poly.size(); i-- > 0;) value = value * q + poly[i];
    return value;
}

ValidationReport validate_model(const VarietyModel& m) {
    ValidationReport rep;
    auto violation = [&rep](const std::string& s) { rep.violations.push_back(s); };
    auto warning = [&rep](const std::string& s) { rep.warnings.push_back(s); };

    const size_t nd = m.divisors.size();
    if (nd == 0) violation("model has no boundary divisors");
    if (m.kappa.size() != nd) violation("kappa length does not match the divisor count");
    if (m.character_class.size() != nd) violation("character class length does not match the divisor count");
    if (m.picard_projection.size() != static_cast<size_t>(m.picard_rank))
        violation("picard projection row count does not match the picard rank");
    for (const auto& row : m.picard_projection)
        if (row.size() != nd) violation("picard projection row length does not match the divisor count");

    for (const auto& d : m.divisors) {
        if (std::abs(d.a_mult) > 1)
            violation("div(a) not reduced along '" + d.label + "' (multiplicity " +
                      std::to_string(d.a_mult) + ")");
        if (d.a_mult > 0 && d.kind != DivisorKind::a_zero)
            violation("divisor '" + d.label + "' has a_mult > 0 but is not marked a_zero");
        if (d.a_mult < 0 && d.kind != DivisorKind::a_pole)
            violation("divisor '" + d.label + "' has a_mult < 0 but is not marked a_pole");
        if (d.kind == DivisorKind::a_pole && d.e <= 1)
            violation("x must have pole order > 1 along the a-pole divisor '" + d.label + "'");
        if (d.d <= 0)
            warning("kappa coefficient of '" + d.label +
                    "' is not positive; log-anticanonical positivity fails on this face and "
                    "results relying on it apply only after shifting into the interior cone");
    }

    // The character class must die in the geometric Picard group.
    if (m.character_class.size() == nd && m.picard_projection.size() == static_cast<size_t>(m.picard_rank)) {
        for (const auto& row : m.picard_projection) {
            if (row.size() != nd) continue;
            long dot = 0;
            for (size_t i = 0; i < nd; ++i) dot += row[i] * m.character_class[i];
            if (dot != 0) violation("character class does not project to zero in the Picard group");
        }
    }

    // Stratification point counts must add up to the total, and the open
    // orbit must appear exactly once.
    size_t open_orbits = 0;
    for (const auto& st : m.strata) {
        if (st.divisors.empty()) ++open_orbits;
        for (int idx : st.divisors)
            if (idx < 0 || static_cast<size_t>(idx) >= nd)
                violation("stratum references divisor index " + std::to_string(idx));
    }
    if (open_orbits != 1) violation("stratification must contain the open orbit exactly once");
    for (long q : {2L, 3L, 5L, 7L, 11L, 13L}) {
        long sum = 0;
        for (const auto& st : m.strata) sum += evaluate_point_count(st.point_count, q);
        if (sum != evaluate_point_count(m.total_point_count, q)) {
            std::ostringstream os;
            os << "stratum point counts sum to " << sum << " instead of "
               << evaluate_point_count(m.total_point_count, q) << " at q = " << q;
            violation(os.str());
        }
    }
    return rep;
}

double cone_laplace(const SimplicialCone& cone, const std::vector<double>& s) {
    const size_t n = cone.generators.size();
    if (n == 0) throw std::invalid_argument("cone_laplace: empty cone");
    for (const auto& g : cone.generators)
        if (g.size() != n) throw std::invalid_argument("cone_laplace: cone is not full-dimensional simplicial");
    if (s.size() != n) throw std::invalid_argument("cone_laplace: parameter dimension mismatch");

    // Solve G^T c = s (columns are the generators) and take det along the way.
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) a[i][j] = static_cast<double>(cone.generators[j][i]);
        a[i][n] = s[i];
    }
    double det = 1.0;
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-12) throw std::invalid_argument("cone_laplace: degenerate generators");
        if (piv != col) {
            std::swap(a[piv], a[col]);
            det = -det;
        }
        det *= a[col][col];
        for (size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (size_t k = col; k <= n; ++k) a[r][k] -= f * a[col][k];
        }
    }
    double value = 1.0 / std::abs(det);
    for (size_t i = 0; i < n; ++i) {
        const double ci = a[i][n] / a[i][i];
        if (!(ci > 0)) throw std::domain_error("cone_laplace: parameter not interior to the dual cone");
        value /= ci;
    }
    return value;
}

Rational tamagawa_local_density(const VarietyModel& m, long p) {
    for (const auto& st : m.strata) {
        if (!st.divisors.empty()) continue;
        mpz_class pd;
        mpz_ui_pow_ui(pd.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(m.dim));
        return Rational(mpz_class(evaluate_point_count(st.point_count, p)), pd);
    }
    throw std::invalid_argument("tamagawa_local_density: model lacks an open orbit stratum");
}

nlohmann::ordered_json model_to_json(const VarietyModel& m) {
    nlohmann::ordered_json j;
    j["name"] = m.name;
    j["dim"] = m.dim;
    j["picard_rank"] = m.picard_rank;
    j["divisors"] = nlohmann::ordered_json::array();
    for (const auto& d : m.divisors) {
        nlohmann::ordered_json jd;
        jd["label"] = d.label;
        jd["d"] = d.d;
        jd["e"] = d.e;
        jd["a_mult"] = d.a_mult;
        jd["kind"] = kind_name(d.kind);
        j["divisors"].push_back(jd);
    }
    j["kappa"] = m.kappa;
    j["character_class"] = m.character_class;
    j["picard_projection"] = m.picard_projection;
    j["strata"] = nlohmann::ordered_json::array();
    for (const auto& st : m.strata) {
        nlohmann::ordered_json js;
        js["divisors"] = st.divisors;
        js["point_count"] = st.point_count;
        j["strata"].push_back(js);
    }
    j["total_point_count"] = m.total_point_count;
    return j;
}

VarietyModel model_from_json(const nlohmann::ordered_json& j) {
    VarietyModel m;
    m.name = j.at("name").get<std::string>();
    m.dim = j.at("dim").get<long>();
    m.picard_rank = j.at("picard_rank").get<long>();
    for (const auto& jd : j.at("divisors")) {
        BoundaryDivisor d;
        d.label = jd.at("label").get<std::string>();
        d.d = jd.at("d").get<long>();
        d.e = jd.at("e").get<long>();
        d.a_mult = jd.at("a_mult").get<long>();
        d.kind = kind_from_name(jd.at("kind").get<std::string>());
        m.divisors.push_back(d);
    }
    m.kappa = j.at("kappa").get<std::vector<long>>();
    m.character_class = j.at("character_class").get<std::vector<long>>();
    m.picard_projection = j.at("picard_projection").get<std::vector<std::vector<long>>>();
    for (const auto& js : j.at("strata")) {
        Stratum st;
        st.divisors = js.at("divisors").get<std::vector<int>>();
        st.point_count = js.at("point_count").get<std::vector<long>>();
        m.strata.push_back(st);
    }
    m.total_point_count = j.at("total_point_count").get<std::vector<long>>();
    return m;
}

}  // namespace hzeta::geom
