#include "hzeta/arith.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hzeta {

Rational Rational::parse(const std::string& text) {
    mpq_class q;
    if (q.set_str(text, 10) != 0) throw std::invalid_argument("Rational::parse: bad literal '" + text + "'");
    if (q.get_den() == 0) throw std::domain_error("Rational::parse: zero denominator");
    q.canonicalize();
    return Rational(q);
}

std::string Rational::str() const { return v_.get_str(); }

Rational Rational::inverse() const {
    if (is_zero()) throw std::domain_error("Rational::inverse of zero");
    return Rational(mpq_class(1 / v_));
}

Rational Rational::pow(long e) const {
    if (e == 0) return Rational(1);
    const Rational base = e < 0 ? inverse() : *this;
    unsigned long n = static_cast<unsigned long>(e < 0 ? -e : e);
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), base.num().get_mpz_t(), n);
    mpz_pow_ui(den.get_mpz_t(), base.den().get_mpz_t(), n);
    return Rational(num, den);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw std::domain_error("Rational: division by zero");
    return Rational(mpq_class(a.v_ / b.v_));
}

std::ostream& operator<<(std::ostream& os, const Rational& q) { return os << q.raw(); }

}  // namespace hzeta

namespace hzeta::arith {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void require_prime(long p) {
    if (!is_prime(p)) throw std::invalid_argument("expected a prime, got " + std::to_string(p));
}

mpz_class mpz_pow(long base, unsigned long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), e);
    return r;
}

}  // namespace

Place Place::finite(long p) {
    require_prime(p);
    return Place{false, p};
}

long padic_valuation(const Rational& q, long p) {
    require_prime(p);
    if (q.is_zero()) return val_infinity;
    const mpz_class pz(p);
    mpz_class tmp;
    long vnum = static_cast<long>(mpz_remove(tmp.get_mpz_t(), q.num().get_mpz_t(), pz.get_mpz_t()));
    long vden = static_cast<long>(mpz_remove(tmp.get_mpz_t(), q.den().get_mpz_t(), pz.get_mpz_t()));
    return vnum - vden;
}

Rational padic_abs(const Rational& q, long p) {
    if (q.is_zero()) return Rational(0);
    const long v = padic_valuation(q, p);
    if (v >= 0) return Rational(mpz_class(1), mpz_pow(p, static_cast<unsigned long>(v)));
    return Rational(mpz_pow(p, static_cast<unsigned long>(-v)));
}

Rational padic_fractional_part(const Rational& q, long p) {
    const long v = padic_valuation(q, p);
    if (q.is_zero() || v >= 0) return Rational(0);
    const unsigned long w = static_cast<unsigned long>(-v);
    const mpz_class pw = mpz_pow(p, w);
    // q = n / (d * p^w) with p coprime to n and d; the fractional part is
    // (n * d^{-1} mod p^w) / p^w.
    mpz_class d = q.den() / pw;
    mpz_class dinv;
    if (mpz_invert(dinv.get_mpz_t(), d.get_mpz_t(), pw.get_mpz_t()) == 0)
        throw std::logic_error("padic_fractional_part: non-invertible denominator");
    mpz_class c = (q.num() * dinv) % pw;
    if (c < 0) c += pw;
    return Rational(c, pw);
}

Complex additive_character(const Rational& q, const Place& v) {
    if (v.archimedean) {
        // exp(-2 pi i q); reduce q mod 1 exactly first so huge rationals
        // do not lose the phase.
        mpz_class fq, fr;
        mpz_fdiv_qr(fq.get_mpz_t(), fr.get_mpz_t(), q.num().get_mpz_t(), q.den().get_mpz_t());
        const double frac = mpq_class(fr, q.den()).get_d();
        return std::polar(1.0, -two_pi * frac);
    }
    const Rational frac = padic_fractional_part(q, v.p);
    return std::polar(1.0, two_pi * frac.to_double());
}

double local_zeta(double s, long p) {
    require_prime(p);
    const double x = std::pow(static_cast<double>(p), -s);
    if (std::abs(1.0 - x) < 1e-14) throw std::domain_error("local_zeta: pole at p^{-s} = 1");
    return 1.0 / (1.0 - x);
}

Complex local_zeta(Complex s, long p) {
    require_prime(p);
    const Complex x = std::exp(-s * std::log(static_cast<double>(p)));
    if (std::abs(1.0 - x) < 1e-14) throw std::domain_error("local_zeta: pole at p^{-s} = 1");
    return 1.0 / (1.0 - x);
}

ZetaTruncated riemann_zeta_truncated(double s, long prime_cutoff) {
    if (!(s > 1.0)) throw std::domain_error("riemann_zeta_truncated: needs s > 1");
    if (prime_cutoff < 2) throw std::invalid_argument("riemann_zeta_truncated: cutoff < 2");
    double value = 1.0;
    for (long p : primes_up_to(prime_cutoff)) value /= 1.0 - std::pow(static_cast<double>(p), -s);
    // 0 <= log zeta - log value <= sum_{p > P} -log(1 - p^{-s})
    //                           <= (1 - P^{-s})^{-1} * (P^{1-s}/(s-1) + P^{-s}).
    const double P = static_cast<double>(prime_cutoff);
    const double tail = (std::pow(P, 1.0 - s) / (s - 1.0) + std::pow(P, -s)) / (1.0 - std::pow(P, -s));
    return ZetaTruncated{value, value * std::expm1(tail)};
}

Complex zeta_analytic(Complex s) {
    if (std::abs(s - Complex(1.0, 0.0)) < 1e-8) throw std::domain_error("zeta_analytic: pole at s = 1");
    if (s.real() < 0.35) throw std::domain_error("zeta_analytic: Re(s) below supported range");
    // Borwein's alternating-series acceleration: number of terms sized from
    // the imaginary part so the truncation error stays below ~1e-13.
    const double t = std::abs(s.imag());
    const int n = std::min(700, static_cast<int>((std::numbers::pi * t / 2 + 36.0) / 1.7627) + 12);
    std::vector<long double> d(static_cast<size_t>(n) + 1);
    long double term = 1.0L / n;  // (n+i-1)! 4^i / ((n-i)! (2i)!) at i = 0
    long double acc = term;
    d[0] = static_cast<long double>(n) * acc;
    for (int i = 1; i <= n; ++i) {
        term *= 4.0L * (n + i - 1) * (n - i + 1) / (static_cast<long double>(2 * i) * (2 * i - 1));
        acc += term;
        d[static_cast<size_t>(i)] = static_cast<long double>(n) * acc;
    }
    std::complex<long double> sum = 0;
    const std::complex<long double> sl(s.real(), s.imag());
    for (int k = 0; k < n; ++k) {
        const long double sign = (k % 2 == 0) ? 1.0L : -1.0L;
        const std::complex<long double> kp = std::exp(-sl * std::log(static_cast<long double>(k + 1)));
        sum += sign * (d[static_cast<size_t>(k)] - d[static_cast<size_t>(n)]) * kp;
    }
    const std::complex<long double> one(1.0L, 0.0L);
    const std::complex<long double> pref =
        -one / (d[static_cast<size_t>(n)] * (one - std::exp((one - sl) * std::log(2.0L))));
    const std::complex<long double> z = pref * sum;
    return Complex(static_cast<double>(z.real()), static_cast<double>(z.imag()));
}

std::vector<long> primes_up_to(long n) {
    std::vector<long> out;
    if (n < 2) return out;
    std::vector<bool> composite(static_cast<size_t>(n) + 1, false);
    for (long i = 2; i * i <= n; ++i)
        if (!composite[static_cast<size_t>(i)])
            for (long j = i * i; j <= n; j += i) composite[static_cast<size_t>(j)] = true;
    for (long i = 2; i <= n; ++i)
        if (!composite[static_cast<size_t>(i)]) out.push_back(i);
    return out;
}

bool is_prime(long n) {
    if (n < 2) return false;
    for (long q : {2L, 3L, 5L, 7L, 11L, 13L, 17L, 19L, 23L, 29L, 31L, 37L}) {
        if (n == q) return true;
        if (n % q == 0) return false;
    }
    // Deterministic Miller-Rabin for 64-bit with the fixed base set above.
    const auto mulmod = [](unsigned long long a, unsigned long long b, unsigned long long m) {
        return static_cast<unsigned long long>(static_cast<unsigned __int128>(a) * b % m);
    };
    const auto powmod = [&](unsigned long long a, unsigned long long e, unsigned long long m) {
        unsigned long long r = 1;
        for (a %= m; e; e >>= 1, a = mulmod(a, a, m))
            if (e & 1) r = mulmod(r, a, m);
        return r;
    };
    const unsigned long long m = static_cast<unsigned long long>(n);
    unsigned long long d = m - 1;
    int r = 0;
    while ((d & 1) == 0) d >>= 1, ++r;
    for (long q : {2L, 3L, 5L, 7L, 11L, 13L, 17L, 19L, 23L, 29L, 31L, 37L}) {
        unsigned long long x = powmod(static_cast<unsigned long long>(q), d, m);
        if (x == 1 || x == m - 1) continue;
        bool witness = true;
        for (int i = 1; i < r && witness; ++i) {
            x = mulmod(x, x, m);
            if (x == m - 1) witness = false;
        }
        if (witness) return false;
    }
    return true;
}

namespace {

void factor_into(mpz_class n, std::vector<long>& out);

// Pollard rho (Brent variant) for the occasional large cofactor.
mpz_class pollard_rho(const mpz_class& n) {
    if (n % 2 == 0) return 2;
    gmp_randclass rng(gmp_randinit_default);
    rng.seed(0xb5ad4eceul);
    while (true) {
        mpz_class x = rng.get_z_range(n - 2) + 2, y = x, c = rng.get_z_range(n - 1) + 1, d = 1;
        while (d == 1) {
            x = (x * x + c) % n;
            y = (y * y + c) % n;
            y = (y * y + c) % n;
            mpz_class diff = x > y ? x - y : y - x;
            if (diff == 0) break;
            mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
        }
        if (d != 1 && d != n) return d;
    }
}

void factor_into(mpz_class n, std::vector<long>& out) {
    if (n <= 1) return;
    if (mpz_probab_prime_p(n.get_mpz_t(), 32) != 0) {
        if (!n.fits_slong_p()) throw std::overflow_error("prime_support: prime factor exceeds long");
        out.push_back(n.get_si());
        return;
    }
    mpz_class d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

}  // namespace

std::vector<long> prime_support(const mpz_class& n) {
    if (n == 0) throw std::invalid_argument("prime_support: zero has no finite support");
    std::vector<long> out;
    mpz_class m = abs(n);
    for (long p : {2L, 3L, 5L, 7L, 11L, 13L, 17L, 19L, 23L, 29L, 31L, 37L, 41L, 43L, 47L}) {
        if (m % p == 0) {
            out.push_back(p);
            mpz_class tmp;
            mpz_remove(tmp.get_mpz_t(), m.get_mpz_t(), mpz_class(p).get_mpz_t());
            m = tmp;
        }
    }
    for (long p = 53; p < 100000 && m > 1; p += 2) {
        if (!is_prime(p)) continue;
        if (m % p == 0) {
            out.push_back(p);
            mpz_class tmp;
            mpz_remove(tmp.get_mpz_t(), m.get_mpz_t(), mpz_class(p).get_mpz_t());
            m = tmp;
        }
        if (mpz_class(p) * p > m) break;
    }
    factor_into(m, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<long> prime_support(const Rational& q) {
    if (q.is_zero()) throw std::invalid_argument("prime_support: zero rational");
    std::vector<long> a = prime_support(q.num());
    std::vector<long> b = prime_support(q.den());
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

}  // namespace hzeta::arith
