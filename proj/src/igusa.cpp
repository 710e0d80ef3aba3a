#include "hzeta/igusa.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "hzeta/numeric.hpp"

namespace hzeta::igusa {

namespace {

constexpr double pi = 3.14159265358979323846;

// Unit-pair brute force is capped at phi(p^W) <= pair_unit_budget residues
// per variable (the double loop is quadratic in this).
constexpr long pair_unit_budget = 4000;

long floordiv(long a, long b) {
    long q = a / b;
    if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

long ceildiv(long a, long b) { return -floordiv(-a, b); }

long pow_long_checked(long p, long w) {
    long r = 1;
    for (long i = 0; i < w; ++i) {
        if (r > (1L << 40) / p)
            throw num::tolerance_error("igusa: residue modulus overflow");
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
    if (r != 1) throw std::invalid_argument("igusa: residue not invertible");
    return ((t % m) + m) % m;
}

long rational_mod(const Rational& q, long m) {
    const long n = ((static_cast<long>(mpz_class(q.num() % m).get_si()) % m) + m) % m;
    const long d = ((static_cast<long>(mpz_class(q.den() % m).get_si()) % m) + m) % m;
    return static_cast<long>((static_cast<unsigned long long>(n) *
                              static_cast<unsigned long long>(mod_inverse(d, m))) %
                             static_cast<unsigned long long>(m));
}

// Average over unit pairs (u, v) mod p^w of psi(c p^{-w} u^d v^e), by
// histogramming the d-th and e-th power maps and convolving against a phase
// table.  c is the unit residue of the argument scaled to valuation -w.
Complex pair_average_brute(long p, long w, long c, long d, long e) {
    const long m = pow_long_checked(p, w);
    if (m - m / p > pair_unit_budget)
        throw num::tolerance_error("igusa: unit-pair average exceeds the brute-force budget");

    std::vector<double> phase_re(static_cast<size_t>(m)), phase_im(static_cast<size_t>(m));
    for (long r = 0; r < m; ++r) {
        const double arg = 2.0 * pi * static_cast<double>(r) / static_cast<double>(m);
        phase_re[static_cast<size_t>(r)] = std::cos(arg);
        phase_im[static_cast<size_t>(r)] = std::sin(arg);
    }
    std::vector<long> hist_d(static_cast<size_t>(m), 0), hist_e(static_cast<size_t>(m), 0);
    long units = 0;
    for (long u = 1; u < m; ++u) {
        if (u % p == 0) continue;
        ++units;
        const long ud = d >= 0 ? mod_pow(u, d, m) : mod_pow(mod_inverse(u, m), -d, m);
        const long ue = e >= 0 ? mod_pow(u, e, m) : mod_pow(mod_inverse(u, m), -e, m);
        ++hist_d[static_cast<size_t>(ud)];
        ++hist_e[static_cast<size_t>(ue)];
    }
    long double re = 0.0L, im = 0.0L;
    for (long r1 = 0; r1 < m; ++r1) {
        if (hist_d[static_cast<size_t>(r1)] == 0) continue;
        const long cr1 = static_cast<long>(
            (static_cast<unsigned long long>(c) * static_cast<unsigned long long>(r1)) %
            static_cast<unsigned long long>(m));
        for (long r2 = 0; r2 < m; ++r2) {
            if (hist_e[static_cast<size_t>(r2)] == 0) continue;
            const long idx = static_cast<long>(
                (static_cast<unsigned long long>(cr1) * static_cast<unsigned long long>(r2)) %
                static_cast<unsigned long long>(m));
            const long double mult = static_cast<long double>(hist_d[static_cast<size_t>(r1)]) *
                                     static_cast<long double>(hist_e[static_cast<size_t>(r2)]);
            re += mult * static_cast<long double>(phase_re[static_cast<size_t>(idx)]);
            im += mult * static_cast<long double>(phase_im[static_cast<size_t>(idx)]);
        }
    }
    const long double total = static_cast<long double>(units) * static_cast<long double>(units);
    return Complex(static_cast<double>(re / total), static_cast<double>(im / total));
}

struct Engine {
    long p, d, e;
    Rational alpha_unit;  // alpha / p^{v(alpha)}
    long v_alpha = 0;
    bool vanish_ok = false;  // the w <= -2 unit average vanishes identically
    Complex s1, s2;
    double sigma1 = 0, sigma2 = 0, lnp = 0;
    std::map<long, Complex> average_cache;  // depth w -> unit-pair average

    // Unit-pair average of the character on the shell with total valuation w.
    Complex shell_average(long w) {
        if (w >= 0) return Complex(1.0, 0.0);
        if (vanish_ok && w <= -2) return Complex(0.0, 0.0);
        auto it = average_cache.find(w);
        if (it != average_cache.end()) return it->second;
        const long depth = -w;
        const long c = rational_mod(alpha_unit, pow_long_checked(p, depth));
        const Complex value = pair_average_brute(p, depth, c, d, e);
        average_cache.emplace(w, value);
        return value;
    }

    Complex ppow(Complex z) const { return std::exp(-z * lnp); }  // p^{-z}

    // sum_{n=lo}^{hi} p^{-n z}; hi absent means the full geometric tail,
    // which requires Re(z) > 0.  Finite windows are entire in z, so the
    // ratio-1 point is removable and handled explicitly.
    Complex geometric(Complex z, long lo, std::optional<long> hi) const {
        const Complex r = ppow(z);
        const Complex head = std::pow(r, static_cast<double>(lo));
        if (!hi) {
            if (z.real() <= 0 || std::abs(1.0 - r) < 1e-14)
                throw std::domain_error("igusa: divergent geometric direction");
            return head / (1.0 - r);
        }
        if (*hi < lo) return Complex(0.0, 0.0);
        if (*hi == lo) return head;
        const double count = static_cast<double>(*hi - lo + 1);
        if (std::abs(1.0 - r) * count < 1e-6) {
            // sum_{k=0}^{C-1} r^k = C (1 + (C-1)/2 (r-1) + O((C(r-1))^2))
            return head * count * (1.0 + (r - 1.0) * ((count - 1.0) / 2.0));
        }
        return (head - std::pow(r, static_cast<double>(*hi + 1))) / (1.0 - r);
    }
};

double pw(long p, double x) { return std::pow(static_cast<double>(p), x); }

}  // namespace

std::optional<std::string> outside_convergence_cone(long d, long e, Complex s1, Complex s2) {
    const double sigma1 = s1.real(), sigma2 = s2.real();
    if (d >= 0 && e >= 0) {
        if (sigma1 <= 0) return "Re(s1) <= 0 with nonnegative first exponent";
        if (sigma2 <= 0) return "Re(s2) <= 0 with nonnegative second exponent";
        return std::nullopt;
    }
    if (d < 0 && e < 0) return std::nullopt;
    if (d < 0 && e == 0) {
        if (sigma2 <= 0) return "Re(s2) <= 0 with vanishing second exponent";
        return std::nullopt;
    }
    if (d < 0 && e > 0) {
        if (sigma2 <= 0) return "Re(s2) <= 0 against a positive second exponent";
        if (e * sigma1 + static_cast<double>(-d) * sigma2 <= 0)
            return "e Re(s1) + |d| Re(s2) <= 0 (mixed-direction divergence)";
        return std::nullopt;
    }
    // d > 0 && e < 0, by exclusion
    if (sigma1 <= 0) return "Re(s1) <= 0 with positive first exponent";
    if (d * sigma2 + static_cast<double>(-e) * sigma1 <= 0)
        return "d Re(s2) + |e| Re(s1) <= 0 (mixed-direction divergence)";
    return std::nullopt;
}

double decay_exponent(long d, long e, Complex s1, Complex s2) {
    double kappa = 0;
    if (d < 0) kappa = std::max(kappa, -s1.real() / static_cast<double>(-d));
    if (e < 0) kappa = std::max(kappa, -s2.real() / static_cast<double>(-e));
    return kappa;
}

EtaResult eta_eval(const MonomialSum& spec, Complex s1, Complex s2, double tol) {
    if (auto reason = outside_convergence_cone(spec.d, spec.e, s1, s2))
        throw std::domain_error("eta_eval: outside the convergence cone: " + *reason);
    if (!(tol > 0)) throw std::invalid_argument("eta_eval: tolerance must be positive");

    const long p = spec.p, d = spec.d, e = spec.e;
    const long n_min = spec.range.n_min, m_min = spec.range.m_min;
    const std::optional<long> n_max =
        spec.range.n_max ? std::optional<long>(*spec.range.n_max) : std::nullopt;
    const std::optional<long> m_max =
        spec.range.m_max ? std::optional<long>(*spec.range.m_max) : std::nullopt;

    EtaResult out;
    out.max_n = static_cast<int>(n_min) - 1;
    out.max_m = static_cast<int>(m_min) - 1;

    Engine eng;
    eng.p = p;
    eng.d = d;
    eng.e = e;
    eng.s1 = s1;
    eng.s2 = s2;
    eng.sigma1 = s1.real();
    eng.sigma2 = s2.real();
    eng.lnp = std::log(static_cast<double>(p));

    if (spec.alpha.is_zero()) {
        // trivial phase: the sum is a product of plain geometric series
        out.value = eng.geometric(s1, n_min, n_max) * eng.geometric(s2, m_min, m_max);
        return out;
    }
    eng.v_alpha = arith::padic_valuation(spec.alpha, p);
    eng.alpha_unit = spec.alpha * Rational(p).pow(-eng.v_alpha);
    eng.vanish_ok = (std::abs(d) % p != 0) || (std::abs(e) % p != 0);
    const long va = eng.v_alpha;

    std::complex<long double> acc(0.0L, 0.0L);
    const auto add = [&acc](const Complex& z) {
        acc += std::complex<long double>(z.real(), z.imag());
    };
    const auto record_shell = [&](long n, long m, const Complex& avg) {
        ++out.shells;
        out.max_n = std::max(out.max_n, static_cast<int>(n));
        out.max_m = std::max(out.max_m, static_cast<int>(m));
        if (std::abs(avg) > 1e-12) {
            ++out.survivors;
            if (out.survivor_shells.size() < 4096)
                out.survivor_shells.emplace_back(static_cast<int>(n), static_cast<int>(m));
        }
    };

    // n-part of row m, excluding the overall p^{-m s2}; adds any non-exact
    // truncation error to out.tail_bound (scaled by |p^{-m s2}| by the caller
    // being conservative: we scale it here directly).
    const auto row_value = [&](long m, double row_tol) -> Complex {
        std::complex<long double> row(0.0L, 0.0L);
        const double m_scale = pw(p, -eng.sigma2 * static_cast<double>(m));
        if (d > 0) {
            // w increases with n; from n_one on, every average is exactly 1
            long n_one = std::max(n_min, ceildiv(-va - m * e, d));
            if (n_max && n_one > *n_max + 1) n_one = *n_max + 1;
            for (long n = n_min; n < n_one; ++n) {
                const long w = va + n * d + m * e;
                const Complex avg = eng.shell_average(w);
                record_shell(n, m, avg);
                const Complex term = avg * eng.geometric(s1, n, n);
                row += std::complex<long double>(term.real(), term.imag());
            }
            const Complex ones = eng.geometric(s1, n_one, n_max);
            row += std::complex<long double>(ones.real(), ones.imag());
        } else if (d == 0) {
            const long w = va + m * e;
            const Complex avg = eng.shell_average(w);
            record_shell(n_min, m, avg);
            const Complex term = avg * eng.geometric(s1, n_min, n_max);
            row += std::complex<long double>(term.real(), term.imag());
        } else {  // d < 0: w decreases with n
            long n = n_min;
            while (true) {
                if (n_max && n > *n_max) break;
                const long w = va + n * d + m * e;
                if (w <= -2 && eng.vanish_ok) break;  // all deeper shells vanish identically
                if (w <= -1 && !eng.vanish_ok) {
                    // no identical vanishing available: geometric tail with |avg| <= 1
                    if (eng.sigma1 <= 1e-9)
                        throw num::tolerance_error(
                            "eta_eval: cannot bound the deep-n tail (p divides both exponents "
                            "and Re(s1) <= 0)");
                    const double rest = pw(p, -eng.sigma1 * static_cast<double>(n)) /
                                        (1.0 - pw(p, -eng.sigma1)) * m_scale;
                    if (rest < row_tol) {
                        out.tail_bound += rest;
                        break;
                    }
                }
                const Complex avg = eng.shell_average(w);
                record_shell(n, m, avg);
                const Complex term = avg * eng.geometric(s1, n, n);
                row += std::complex<long double>(term.real(), term.imag());
                ++n;
            }
        }
        return Complex(static_cast<double>(row.real()), static_cast<double>(row.imag()));
    };

    // Bound for the sum of |rows| with index > M (only used when m is
    // unbounded); each case follows the sign pattern of (d, e).
    const auto rows_tail = [&](long M) -> double {
        const double lim1 = 1.0 - pw(p, -std::max(eng.sigma1, 1e-9));
        if (d >= 0 && e < 0) {
            if (eng.vanish_ok && d > 0) {
                // nonzero averages need n >= (m|e| - va - 1)/d
                const double rho = pw(p, -(eng.sigma2 + eng.sigma1 * static_cast<double>(-e) /
                                                            static_cast<double>(d)));
                if (rho > 1.0 - 1e-9)
                    throw num::tolerance_error("eta_eval: mixed-direction tail does not contract");
                const double K =
                    pw(p, eng.sigma1 * static_cast<double>(va + 1) / static_cast<double>(d)) / lim1;
                return K * std::pow(rho, static_cast<double>(M + 1)) / (1.0 - rho);
            }
            if (eng.sigma2 <= 1e-9)
                throw num::tolerance_error("eta_eval: cannot bound the deep-m tail");
            return pw(p, -eng.sigma1 * static_cast<double>(n_min)) / lim1 *
                   pw(p, -eng.sigma2 * static_cast<double>(M + 1)) / (1.0 - pw(p, -eng.sigma2));
        }
        if (d < 0) {
            if (eng.vanish_ok && eng.sigma1 <= 0) {
                // rows span n in [n_min, (va + m e + 1)/|d|]; bound each term
                // by count * p^{|s1| n_cap} and close the linear-geometric sum
                const double rho =
                    pw(p, -eng.sigma2 +
                              (-eng.sigma1) * static_cast<double>(e) / static_cast<double>(-d));
                if (rho > 1.0 - 1e-9)
                    throw num::tolerance_error("eta_eval: mixed-direction tail does not contract");
                const double K = pw(p, (-eng.sigma1) * static_cast<double>(va + 1) /
                                           static_cast<double>(-d));
                const double c1 = std::max(0.0, static_cast<double>(e) / static_cast<double>(-d));
                const double c0 = std::max(
                    1.0, static_cast<double>(va + 1) / static_cast<double>(-d) -
                             static_cast<double>(n_min) + 2.0);
                const double rM = std::pow(rho, static_cast<double>(M + 1));
                const double geo0 = rM / (1.0 - rho);
                const double geo1 = rM * (static_cast<double>(M + 1) - static_cast<double>(M) * rho) /
                                    ((1.0 - rho) * (1.0 - rho));
                return K * (c0 * geo0 + c1 * geo1);
            }
            if (eng.sigma1 <= 1e-9 || eng.sigma2 <= 1e-9)
                throw num::tolerance_error("eta_eval: cannot bound the deep-m tail");
            return pw(p, -eng.sigma1 * static_cast<double>(n_min)) / lim1 *
                   pw(p, -eng.sigma2 * static_cast<double>(M + 1)) / (1.0 - pw(p, -eng.sigma2));
        }
        // d >= 0 && e >= 0: plain geometric rows (sigma1, sigma2 > 0 by the cone)
        return pw(p, -eng.sigma1 * static_cast<double>(n_min)) / lim1 *
               pw(p, -eng.sigma2 * static_cast<double>(M + 1)) / (1.0 - pw(p, -eng.sigma2));
    };

    long m = m_min;
    long row_index = 0;
    while (true) {
        if (m_max && m > *m_max) break;

        if (!m_max) {
            // exact whole-tail closures and exact-zero terminations
            if (e > 0 && d >= 0) {
                const long m_one = std::max(m_min, ceildiv(-va - n_min * d, e));
                if (m >= m_one) {
                    // every remaining row is identically 1: close both sums
                    const Complex ones_row = eng.geometric(s1, n_min, n_max);
                    const Complex closure = ones_row * eng.geometric(s2, m, std::nullopt);
                    add(closure);
                    break;
                }
            }
            if (e == 0) {
                // rows do not depend on m: one row times the m-geometric
                const Complex row = row_value(m, tol / 4.0);
                const Complex closure = row * eng.geometric(s2, m, std::nullopt);
                add(closure);
                break;
            }
            if (e < 0 && d <= 0 && eng.vanish_ok && va + n_min * d + m * e <= -2) {
                break;  // this row and all deeper ones vanish identically
            }
        }

        const double row_tol =
            tol / (2.0 * static_cast<double>((row_index + 1) * (row_index + 2)));
        const Complex row = row_value(m, row_tol);
        add(row * eng.ppow(s2 * static_cast<double>(m)));
        ++row_index;

        if (!m_max && !(e < 0 && d <= 0 && eng.vanish_ok)) {
            const double rest = rows_tail(m);
            if (rest < tol / 2.0) {
                out.tail_bound += rest;
                break;
            }
            if (row_index > 100000)
                throw num::tolerance_error("eta_eval: row loop failed to terminate");
        }
        ++m;
    }

    out.value = Complex(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    out.tail_bound += 1e-14 * (1.0 + std::abs(out.value));
    if (out.tail_bound > tol)
        throw num::tolerance_error("eta_eval: accumulated tail bounds exceed the tolerance");
    return out;
}

DecayFit eta_decay_fit(long p, long d, long e, Complex s1, Complex s2, int k_max,
                       const ShellRange& range, double tol) {
    if (k_max < 2) throw std::invalid_argument("eta_decay_fit: need at least two sample points");
    DecayFit fit;
    fit.kappa = decay_exponent(d, e, s1, s2);
    std::vector<double> xs, ys;
    for (int k = 1; k <= k_max; ++k) {
        MonomialSum spec;
        spec.p = p;
        spec.d = d;
        spec.e = e;
        spec.alpha = Rational(p).pow(k);
        spec.range = range;
        const EtaResult r = eta_eval(spec, s1, s2, tol);
        const double lv = std::log(std::max(std::abs(r.value), 1e-300));
        fit.log_values.push_back(lv);
        xs.push_back(static_cast<double>(k) * std::log(static_cast<double>(p)));
        ys.push_back(lv);
    }
    fit.slope = num::fit_line(xs, ys).slope;
    return fit;
}

}  // namespace hzeta::igusa
