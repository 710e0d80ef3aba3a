#include "hzeta/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "hzeta/numeric.hpp"

namespace hzeta::fourier {

namespace {

constexpr double pi = 3.14159265358979323846;

// Largest modulus p^W we are willing to brute-force a unit average over.
constexpr long residue_budget = 8'000'000;

long floordiv(long a, long b) {
    long q = a / b;
    if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

// p^w as a long, saturating just above the brute-force budget.
long pow_long(long p, long w) {
    long r = 1;
    for (long i = 0; i < w; ++i) {
        if (r > residue_budget) return residue_budget + 1;
        r *= p;
    }
    return r;
}

long mod_pow(long base, long exp, long m) {
    unsigned long long r = 1, b = static_cast<unsigned long long>(((base % m) + m) % m);
    while (exp > 0) {
        if (exp & 1) r = (r * b) % static_cast<unsigned long long>(m);
        b = (b * b) % static_cast<unsigned long long>(m);
        exp >>= 1;
    }
    return static_cast<long>(r);
}

long mod_inverse(long a, long m) {
    long t = 0, nt = 1, r = m, nr = ((a % m) + m) % m;
    while (nr != 0) {
        const long q = r / nr;
        std::swap(t, nt);
        nt -= q * t;
        std::swap(r, nr);
        nr -= q * r;
    }
    if (r != 1) throw std::invalid_argument("mod_inverse: not invertible");
    return ((t % m) + m) % m;
}

// Residue mod m of a rational whose denominator is coprime to m.
long rational_mod(const Rational& q, long m) {
    const long n = ((static_cast<long>(mpz_class(q.num() % m).get_si()) % m) + m) % m;
    const long d = ((static_cast<long>(mpz_class(q.den() % m).get_si()) % m) + m) % m;
    return static_cast<long>((static_cast<unsigned long long>(n) *
                              static_cast<unsigned long long>(mod_inverse(d, m))) %
                             static_cast<unsigned long long>(m));
}

/**
 * Depth-W unit average of the additive character,
 *   F(p, W) = (1/phi(p^W)) * sum over units u mod p^W of exp(2 pi i u / p^W),
 * by direct summation.  After substituting away the unit part of its argument
 * this is the only character average a shell of the oracle needs.  (The sum
 * telescopes to 1, -1/(p-1), 0 for W <= 0, = 1, >= 2; the oracle deliberately
 * does not use that.)
 */
double unit_average_brute(long p, long w) {
    if (w <= 0) return 1.0;
    const long m = pow_long(p, w);
    if (m > residue_budget)
        throw num::tolerance_error("unit average: residue modulus exceeds brute-force budget");
    long double re = 0.0L;
    long count = 0;
    const long double step = 2.0L * static_cast<long double>(pi) / static_cast<long double>(m);
    for (long u = 1; u < m; ++u) {
        if (u % p == 0) continue;
        re += cosl(step * static_cast<long double>(u));
        ++count;
    }
    return static_cast<double>(re / static_cast<long double>(count));
}

double unit_average_cached(long p, long w) {
    if (w <= 0) return 1.0;
    static std::map<std::pair<long, long>, double> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find({p, w});
    if (it != cache.end()) return it->second;
    const double v = unit_average_brute(p, w);
    cache.emplace(std::make_pair(p, w), v);
    return v;
}

// Real decay rates of the shell sum in the four truncation directions.
struct TailRates {
    double s0;  // Re(s0)
    double s2;  // Re(s2); deep-negative v(a) row sums decay at rate s2 - 2
    double m1;  // Re(s0) + 1: decay per unit of v(a) at large positive valuation
    double m2;  // Re(s0 + s2): m2 - 1 controls the deep-negative v(x) direction
    double m3;  // Re(2 s0 + s2)
    double q;   // 1/p
};

TailRates tail_rates(const PicParam& s, long p) {
    TailRates r;
    r.s0 = s.s0.real();
    r.s2 = s.s2.real();
    r.m1 = r.s0 + 1.0;
    r.m2 = r.s0 + r.s2;
    r.m3 = 2.0 * r.s0 + r.s2;
    r.q = 1.0 / static_cast<double>(p);
    if (r.m1 < 1e-2 || r.m2 < 1.0 + 1e-2 || r.m3 < 1e-2)
        throw std::domain_error(
            "local oracle: parameters too close to the divergence locus for rigorous tails");
    return r;
}

double pw(long p, double e) { return std::pow(static_cast<double>(p), e); }

// |shell term| with character and twist bounded by 1:
//   (1 - 1/p) * p^{-i} * p^{-s0 (j - mu) + s2 mu},  mu = min(j, i-j, 0).
double term_abs(const TailRates& r, long p, long i, long j) {
    const long mu = std::min({j, i - j, 0L});
    return (1.0 - r.q) * pw(p, -static_cast<double>(i)) *
           pw(p, -r.s0 * static_cast<double>(j - mu) + r.s2 * static_cast<double>(mu));
}

// Rows with v(a) > j_max, every v(x): split at i >= j (mu = 0, rate m1 per
// row) and i < j (mu = i - j, the i-sum converges at rate m2 - 1 and leaves
// the same m1 row decay).
double bound_rows_above(const TailRates& r, long p, long j_max) {
    const double row_decay = 1.0 - pw(p, -r.m1);
    const double head = pw(p, -r.m1 * static_cast<double>(j_max + 1)) / row_decay;
    const double k_side = (1.0 - r.q) * pw(p, 1.0 - r.m2) / (1.0 - pw(p, -(r.m2 - 1.0)));
    return head * (1.0 + k_side);
}

// Rows with v(a) < j_min, every v(x): whole-row bound decaying at rate s2 - 2
// (the i-sum contributes p^{-2j} against the height's p^{s2 j}).  Only valid
// for Re(s2) > 2; j_min must be <= 0.
double bound_rows_below(const TailRates& r, long p, long j_min) {
    const double bracket = 1.0 / (1.0 - r.q) + pw(p, 1.0 - r.m2) / (1.0 - pw(p, -(r.m2 - 1.0)));
    const double rate = r.s2 - 2.0;
    return (1.0 - r.q) * bracket * pw(p, rate * static_cast<double>(j_min - 1)) /
           (1.0 - pw(p, -rate));
}

// Columns with v(x) > i_max for rows in [j_min, j_max].  Requires
// i_max >= 2 * max(j_max, 0) so that mu = min(j, 0) throughout the region.
double bound_cols_above(const TailRates& r, long p, long i_max, long j_min, long j_max) {
    double s = 0;
    for (long j = j_min; j <= j_max; ++j) {
        const long mu = std::min(j, 0L);
        s += pw(p, -r.s0 * static_cast<double>(j - mu) + r.s2 * static_cast<double>(mu));
    }
    return pw(p, -static_cast<double>(i_max + 1)) * s;
}

// Columns with v(x) < i_min for rows in [j_min, j_max]: for each row, exact
// term bounds down to the corner i <= min(2j, j) where mu = i - j and the
// remaining sum is geometric at rate m2 - 1.
double bound_cols_below(const TailRates& r, long p, long i_min, long j_min, long j_max) {
    const double geo = 1.0 / (1.0 - pw(p, -(r.m2 - 1.0)));
    double s = 0;
    for (long j = j_min; j <= j_max; ++j) {
        const long corner = std::min(2 * j, j);
        const long top = std::min(corner, i_min - 1);
        for (long i = top + 1; i <= i_min - 1; ++i) s += term_abs(r, p, i, j);
        s += (1.0 - r.q) * pw(p, (r.m2 - 1.0) * static_cast<double>(top)) * geo *
             pw(p, -r.m3 * static_cast<double>(j));
    }
    return s;
}

// Rows with 2 v(a) <= -v(alpha) - 1 sum to zero over v(x): the unit averages
// at depths 0 and 1 cancel exactly against the geometric i-tail while mu
// stays pinned at v(a).  Everything below this floor can be dropped.
long vanishing_floor(long v_alpha) { return floordiv(-v_alpha - 1, 2); }

Complex cpow_p(long p, Complex e) { return std::exp(e * std::log(static_cast<double>(p))); }

LocalTransform oracle_core(const PicParam& s, bool with_character, long v_alpha, long p,
                           const OracleConfig& cfg, double t) {
    const TailRates r = tail_rates(s, p);
    if (cfg.i_min > cfg.i_max || cfg.j_min > cfg.j_max)
        throw std::invalid_argument("local oracle: empty shell range");
    if (cfg.i_max < 2 * std::max(cfg.j_max, 0))
        throw std::invalid_argument("local oracle: i_max must be >= 2*max(j_max, 0)");

    const double lp = std::log(static_cast<double>(p));
    std::complex<long double> acc(0.0L, 0.0L);
    long shells = 0;
    for (long j = cfg.j_min; j <= cfg.j_max; ++j) {
        const Complex twist = t == 0.0 ? Complex(1.0, 0.0)
                                       : std::exp(Complex(0.0, -static_cast<double>(j) * t * lp));
        for (long i = cfg.i_min; i <= cfg.i_max; ++i) {
            const long mu = std::min({j, i - j, 0L});
            const double f =
                with_character ? unit_average_cached(p, -(v_alpha + i)) : 1.0;
            const double weight = (1.0 - r.q) * pw(p, -static_cast<double>(i));
            const Complex height = cpow_p(
                p, -s.s0 * static_cast<double>(j - mu) + s.s2 * static_cast<double>(mu));
            const Complex term = weight * f * height * twist;
            acc += std::complex<long double>(term.real(), term.imag());
            ++shells;
        }
    }

    double tail = bound_rows_above(r, p, cfg.j_max) +
                  bound_cols_above(r, p, cfg.i_max, cfg.j_min, cfg.j_max);
    if (with_character && cfg.i_min - 1 <= -v_alpha - 2) {
        // every omitted column has v(alpha x) <= -2, where the unit average
        // is a full Ramanujan sum and vanishes identically
    } else {
        tail += bound_cols_below(r, p, cfg.i_min, cfg.j_min, cfg.j_max);
    }
    if (with_character && cfg.j_min - 1 <= vanishing_floor(v_alpha)) {
        // every omitted row below j_min vanishes identically
    } else if (r.s2 > 2.0 + 1e-2) {
        if (cfg.j_min > 0) throw std::invalid_argument("local oracle: j_min must be <= 0");
        tail += bound_rows_below(r, p, cfg.j_min);
    } else {
        throw num::tolerance_error(
            "local oracle: deep a-valuation tail needs Re(s2) > 2 or a vanishing-row cutoff");
    }

    LocalTransform out;
    out.value = Complex(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    out.error_bound = tail + 1e-14 * (1.0 + std::abs(out.value)) +
                      static_cast<double>(shells) * 1e-17;
    out.shells = shells;
    if (out.error_bound > cfg.tolerance)
        throw num::tolerance_error("local oracle: tail bounds exceed the requested tolerance");
    return out;
}

}  // namespace

Rational unit_character_moment(const Rational& x, long p) {
    const long v = arith::padic_valuation(x, p);
    if (v >= 0) return Rational(1);
    if (v == -1) return Rational(-1, p - 1);
    return Rational(0);
}

Complex monomial_character_moment(const Rational& a, long d, long p, int depth) {
    if (a.is_zero()) return Complex(1.0, 0.0);
    const long v = arith::padic_valuation(a, p);
    if (v >= 0) return Complex(1.0, 0.0);  // the phase is 1 on every unit
    const long w = -v;
    if (depth < w)
        throw std::invalid_argument(
            "monomial_character_moment: depth smaller than the conductor of the phase");
    const long m = pow_long(p, depth);
    if (m > residue_budget)
        throw std::invalid_argument("monomial_character_moment: depth exceeds brute-force budget");
    const long mw = pow_long(p, w);
    const long c0 = rational_mod(a * Rational(p).pow(w), mw);

    long double re = 0.0L, im = 0.0L;
    long count = 0;
    const long double step = 2.0L * static_cast<long double>(pi) / static_cast<long double>(mw);
    for (long u = 1; u < m; ++u) {
        if (u % p == 0) continue;
        const long uw = u % mw;
        const long upow = d >= 0 ? mod_pow(uw, d, mw) : mod_pow(mod_inverse(uw, mw), -d, mw);
        const long rphase = static_cast<long>(
            (static_cast<unsigned long long>(c0) * static_cast<unsigned long long>(upow)) %
            static_cast<unsigned long long>(mw));
        const long double arg = step * static_cast<long double>(rphase);
        re += cosl(arg);
        im += sinl(arg);
        ++count;
    }
    return Complex(static_cast<double>(re / count), static_cast<double>(im / count));
}

std::optional<Complex> monomial_moment_exact(const Rational& a, long d, long p) {
    if (a.is_zero()) return Complex(1.0, 0.0);
    if (d == 0) return arith::additive_character(a, arith::Place::finite(p));
    const long v = arith::padic_valuation(a, p);
    if (v >= 0) return Complex(1.0, 0.0);
    if (std::abs(d) % p != 0 && v <= -2) return Complex(0.0, 0.0);
    if (std::abs(d) == 1) {
        const Rational m = unit_character_moment(a, p);
        return Complex(m.to_double(), 0.0);
    }
    return std::nullopt;
}

OracleConfig OracleConfig::automatic(long p, const Rational& alpha, const PicParam& s,
                                     double tol, bool with_character) {
    const TailRates r = tail_rates(s, p);
    const bool chi = with_character && !alpha.is_zero();
    const long k = chi ? arith::padic_valuation(alpha, p) : 0;
    constexpr long range_cap = 4000;

    OracleConfig cfg;
    cfg.tolerance = tol;
    const double piece = tol / 4.0;

    cfg.j_max = 2;
    while (bound_rows_above(r, p, cfg.j_max) >= piece) {
        if (++cfg.j_max > range_cap)
            throw num::tolerance_error("local oracle: cannot meet tolerance in the v(a) tail");
    }

    if (chi) {
        // two identically-vanishing rows kept as an in-band cancellation check
        cfg.j_min = static_cast<int>(vanishing_floor(k)) - 2;
    } else {
        if (r.s2 <= 2.0 + 1e-2)
            throw num::tolerance_error(
                "local oracle: the no-character sum needs Re(s2) > 2 for its deep-a tail");
        cfg.j_min = 0;
        while (bound_rows_below(r, p, cfg.j_min) >= piece) {
            if (--cfg.j_min < -range_cap)
                throw num::tolerance_error("local oracle: cannot meet tolerance in the deep-a tail");
        }
    }

    cfg.i_max = 2 * std::max(cfg.j_max, 0);
    while (bound_cols_above(r, p, cfg.i_max, cfg.j_min, cfg.j_max) >= piece) {
        if (++cfg.i_max > range_cap)
            throw num::tolerance_error("local oracle: cannot meet tolerance in the v(x) tail");
    }

    if (chi) {
        // columns with v(alpha x) <= -2 vanish identically (full Ramanujan
        // sums); keep two of them in-band as a cancellation check and drop
        // the deep-x tail exactly
        cfg.i_min = static_cast<int>(-k) - 4;
    } else {
        cfg.i_min = std::min(2 * cfg.j_min, cfg.j_min) - 1;
        while (bound_cols_below(r, p, cfg.i_min, cfg.j_min, cfg.j_max) >= piece) {
            if (--cfg.i_min < -range_cap)
                throw num::tolerance_error(
                    "local oracle: cannot meet tolerance in the deep-x tail");
        }
    }

    long depth = 0;
    if (chi) {
        depth = std::max(0L, -(k + cfg.i_min));
        if (pow_long(p, depth) > residue_budget)
            throw num::tolerance_error(
                "local oracle: required residue depth exceeds the brute-force budget");
    }
    cfg.residue_depth = static_cast<int>(depth);
    return cfg;
}

LocalTransform hhat_p_oracle(const PicParam& s, const Rational& alpha, long p,
                             const OracleConfig& cfg, double t) {
    if (alpha.is_zero()) return oracle_core(s, false, 0, p, cfg, t);
    return oracle_core(s, true, arith::padic_valuation(alpha, p), p, cfg, t);
}

Complex hhat_p_closed(const PicParam& s, const Rational& alpha, long p) {
    if (alpha.is_zero())
        throw std::invalid_argument("hhat_p_closed: use trivial_integral_p at the trivial character");
    const double sigma0 = s.s0.real();
    const double sigma02 = s.s0.real() + s.s2.real();
    const double sigma022 = 2.0 * s.s0.real() + s.s2.real();
    if (sigma0 <= -1.0 + 1e-9 || sigma02 <= 1e-9 || sigma022 <= 1e-9)
        throw std::domain_error("hhat_p_closed: outside the convergence region");

    const Complex A = cpow_p(p, -(s.s0 + 1.0));
    const Complex B = cpow_p(p, -(2.0 * s.s0 + s.s2));
    const Complex C = cpow_p(p, -(s.s0 + s.s2));
    if (std::abs(1.0 - A) < 1e-14 || std::abs(1.0 - B) < 1e-14)
        throw std::domain_error("hhat_p_closed: evaluation on a pole hyperplane");

    const long k = arith::padic_valuation(alpha, p);
    const Complex base = (1.0 - C) / ((1.0 - A) * (1.0 - B));
    if (k == 0) return base;
    if (k < 0) return std::pow(A, static_cast<double>(-k)) * base;

    const Complex Y2 = cpow_p(p, -(s.s2 - 2.0));
    const Complex D = cpow_p(p, s.s0 + s.s2 - 1.0);
    if (std::abs(D - 1.0) < 1e-6)
        throw std::domain_error("hhat_p_closed: too close to the removable locus s0 + s2 = 1");
    const long J = k / 2;
    Complex s_y(0.0, 0.0), s_binv(0.0, 0.0);
    Complex y_pow(1.0, 0.0), binv_pow(1.0, 0.0);
    const Complex b_inv = 1.0 / B;
    for (long j = 1; j <= J; ++j) {
        y_pow *= Y2;
        binv_pow *= b_inv;
        s_y += y_pow;
        s_binv += binv_pow;
    }
    const Complex d_mk = std::pow(D, -static_cast<double>(k));
    const Complex delta = std::pow(D, -static_cast<double>(k + 1)) / static_cast<double>(p - 1);
    const Complex g = (1.0 / (D - 1.0)) *
                          (1.0 / (1.0 - A) - d_mk / (1.0 - B) + s_y - d_mk * s_binv) -
                      delta * (1.0 / (1.0 - B) + s_binv);
    return 1.0 / (1.0 - A) + s_y + (1.0 - 1.0 / static_cast<double>(p)) * g;
}

Complex hhat_p_twisted(const PicParam& s, const Rational& alpha, double t, long p) {
    // |a|^{it} merges into the height exponents: H0^{-s0} H2^{-s2} |a|^{it}
    // = H0^{-(s0+it)} H2^{-(s2-it)} since |a| = H2/H0.
    const PicParam shifted{s.s0 + Complex(0.0, t), s.s2 - Complex(0.0, t)};
    return hhat_p_closed(shifted, alpha, p);
}

Rational hhat_p_closed_exact(long p, long v_alpha, const Rational& X, const Rational& Y) {
    if (X.is_zero() || Y.is_zero())
        throw std::invalid_argument("hhat_p_closed_exact: X and Y must be nonzero");
    const Rational one(1);
    const Rational A = X * Rational(1, p);
    const Rational B = X * X * Y;
    const Rational C = X * Y;
    if (A == one || B == one)
        throw std::domain_error("hhat_p_closed_exact: evaluation on a pole hyperplane");

    const Rational base = (one - C) / ((one - A) * (one - B));
    if (v_alpha == 0) return base;
    if (v_alpha < 0) return A.pow(-v_alpha) * base;

    const Rational Y2 = Rational(p) * Rational(p) * Y;
    const Rational D = (Rational(p) * X * Y).inverse();
    if (D == one)
        throw std::domain_error("hhat_p_closed_exact: on the removable locus s0 + s2 = 1");
    const long k = v_alpha;
    const long J = k / 2;
    Rational s_y(0), s_binv(0);
    for (long j = 1; j <= J; ++j) {
        s_y += Y2.pow(j);
        s_binv += B.pow(-j);
    }
    const Rational d_mk = D.pow(-k);
    const Rational delta = D.pow(-(k + 1)) * Rational(1, p - 1);
    const Rational inv_a = (one - A).inverse();
    const Rational inv_b = (one - B).inverse();
    const Rational g =
        (D - one).inverse() * (inv_a - d_mk * inv_b + s_y - d_mk * s_binv) -
        delta * (inv_b + s_binv);
    return inv_a + s_y + Rational(p - 1, p) * g;
}

Complex trivial_integral_p(const geom::VarietyModel& model, const PicParam& s, long p) {
    if (model.divisors.size() != 2 || model.kappa.size() != 2)
        throw std::invalid_argument("trivial_integral_p: expected a two-divisor model");
    const Complex shift[2] = {s.s0 - static_cast<double>(model.kappa[0]),
                              s.s2 - static_cast<double>(model.kappa[1])};
    for (const Complex& z : shift)
        if (z.real() <= -1.0 + 1e-9)
            throw std::domain_error("trivial_integral_p: pole hyperplane Re(s_i - kappa_i) <= -1");

    const double pd = std::pow(static_cast<double>(p), static_cast<double>(model.dim));
    Complex sum(0.0, 0.0);
    for (const auto& stratum : model.strata) {
        const double count =
            static_cast<double>(geom::evaluate_point_count(stratum.point_count, p));
        Complex factor(count / pd, 0.0);
        for (int idx : stratum.divisors) {
            if (idx < 0 || idx > 1)
                throw std::invalid_argument("trivial_integral_p: divisor index out of range");
            const Complex denom = cpow_p(p, shift[idx] + 1.0) - 1.0;
            if (std::abs(denom) < 1e-14)
                throw std::domain_error("trivial_integral_p: evaluation on a pole hyperplane");
            factor *= static_cast<double>(p - 1) / denom;
        }
        sum += factor;
    }
    const Rational tau = geom::tamagawa_local_density(model, p);
    return sum / tau.to_double();
}

Rational trivial_integral_exact(const geom::VarietyModel& model, long p,
                                long s0_minus_k0, long s2_minus_k2) {
    if (model.divisors.size() != 2 || model.kappa.size() != 2)
        throw std::invalid_argument("trivial_integral_exact: expected a two-divisor model");
    if (s0_minus_k0 < 0 || s2_minus_k2 < 0)
        throw std::invalid_argument("trivial_integral_exact: shifts must be nonnegative integers");
    const long shift[2] = {s0_minus_k0, s2_minus_k2};

    mpz_class pd;
    mpz_ui_pow_ui(pd.get_mpz_t(), static_cast<unsigned long>(p),
                  static_cast<unsigned long>(model.dim));
    Rational sum(0);
    for (const auto& stratum : model.strata) {
        Rational factor(mpz_class(geom::evaluate_point_count(stratum.point_count, p)), pd);
        for (int idx : stratum.divisors) {
            if (idx < 0 || idx > 1)
                throw std::invalid_argument("trivial_integral_exact: divisor index out of range");
            mpz_class denom;
            mpz_ui_pow_ui(denom.get_mpz_t(), static_cast<unsigned long>(p),
                          static_cast<unsigned long>(shift[idx] + 1));
            factor *= Rational(mpz_class(p - 1), mpz_class(denom - 1));
        }
        sum += factor;
    }
    return sum / geom::tamagawa_local_density(model, p);
}

LocalTransform trivial_integral_oracle(const PicParam& s, long p, const OracleConfig& cfg) {
    return oracle_core(s, false, 0, p, cfg, 0.0);
}

}  // namespace hzeta::fourier
