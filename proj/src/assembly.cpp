#include "hzeta/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "hzeta/arith.hpp"

namespace hzeta::assembly {

namespace {

constexpr double pi = 3.14159265358979323846;

struct ArchSetup {
    double abs_alpha = 0;
    Complex beta;      // (s0 + s2)/2, exponent of the radial kernel
    bool beta_real = false;
    Complex u_weight;  // s0 + 1 + it, exponent of e^u
    double m1 = 0;     // its real part
};

ArchSetup arch_setup(const PicParam& s, double alpha, double t) {
    const double sigma0 = s.s0.real(), sigma2 = s.s2.real();
    if (sigma0 <= -1.0 + 1e-12 || sigma2 <= 1e-12 || 2.0 * sigma0 + sigma2 <= 1e-12 ||
        sigma0 + sigma2 <= 1.0 + 1e-12)
        throw std::domain_error("hhat_infty: outside the convergence cone");
    if (alpha == 0.0 && sigma2 <= 2.0 + 1e-9)
        throw std::domain_error("hhat_infty: the non-oscillatory case requires Re(s2) > 2");
    ArchSetup a;
    a.abs_alpha = std::abs(alpha);
    a.beta = 0.5 * (s.s0 + s.s2);
    a.beta_real = std::abs(a.beta.imag()) < 1e-12;
    a.u_weight = s.s0 + 1.0 + Complex(0.0, t);
    a.m1 = a.u_weight.real();
    return a;
}

InftyResult hhat_infty_core(const PicParam& s, double alpha, double t, const QuadConfig& cfg) {
    if (!(cfg.tolerance > 0) || !(cfg.log_range > 0) || !(cfg.x_truncation > 0) ||
        cfg.max_evals <= 0)
        throw std::invalid_argument("hhat_infty: quadrature config fields must be positive");
    const ArchSetup a = arch_setup(s, alpha, t);
    const double sb = a.beta.real();  // > 1/2 inside the cone
    const double sigma2 = s.s2.real();
    const double tol = std::max(cfg.tolerance, 1e-10);

    // |inner integral| <= sqrt(pi) Gamma(sb - 1/2)/Gamma(sb) * c^{1-2 sb} and
    // c >= 1, giving an explicit bound for the deep-negative-u tail.
    const double c_in = std::sqrt(pi) * std::tgamma(sb - 0.5) / std::tgamma(sb);

    double u_lo = -(std::log(c_in / (tol * a.m1) + 1.0) + 6.0) / a.m1;
    u_lo = std::max(u_lo, -cfg.log_range);
    const double tail_lo = c_in * std::exp(u_lo * a.m1) / a.m1;

    double u_hi;
    if (a.abs_alpha == 0.0) {
        u_hi = std::min(cfg.log_range, (std::log(1.0 / tol) + 8.0) / (sigma2 - 2.0) + 2.0);
    } else {
        u_hi = 0.5 * std::log((std::log(1.0 / tol) + 20.0) / (2.0 * pi * a.abs_alpha)) + 2.0;
        u_hi = std::min(cfg.log_range, std::max(u_hi, 1.0));
    }
    if (u_hi <= u_lo) u_hi = u_lo + 1.0;

    double inner_tail_max = 0.0;
    double inner_gk_max = 0.0;

    // inner integral over the whole y-line of (c^2 + y^2)^{-beta} cos(omega y)
    const auto inner_value = [&](double u) -> Complex {
        const double c2 = 1.0 + std::exp(2.0 * u);
        const double c = std::sqrt(c2);
        const double omega = 2.0 * pi * a.abs_alpha * std::exp(u);
        if (a.beta_real && !cfg.force_2d) {
            if (omega == 0.0)
                return Complex(c_in * std::pow(c, 1.0 - 2.0 * sb), 0.0);
            const double nu = sb - 0.5;
            const double z = c * omega;
            if (z > 680.0) return Complex(0.0, 0.0);  // K_nu underflows
            const double bessel = std::cyl_bessel_k(nu, z);
            const double pref =
                2.0 * std::sqrt(pi) / std::tgamma(sb) * std::pow(omega / (2.0 * c), nu);
            return Complex(pref * bessel, 0.0);
        }
        // numeric fallback, folded onto [0, y_max] by evenness; the outer
        // integrand amplifies this value by e^{m1 u}, so both the truncation
        // window and the quadrature budget are weighted accordingly
        const double wt = std::exp(a.m1 * u);
        double y_max =
            std::pow(0.05 * tol * (2.0 * sb - 1.0) / wt, 1.0 / (1.0 - 2.0 * sb));
        y_max = std::max(std::min(y_max, cfg.x_truncation), 4.0 * c);
        inner_tail_max = std::max(
            inner_tail_max, wt * std::pow(y_max, 1.0 - 2.0 * sb) / (2.0 * sb - 1.0));
        const int osc = static_cast<int>(omega * y_max / (2.0 * pi) * 1.2) + 2;
        const Complex beta = a.beta;
        const auto g = [c2, omega, beta](double y) -> Complex {
            return std::exp(-beta * std::log(c2 + y * y)) * std::cos(omega * y);
        };
        const num::QuadResult q =
            num::integrate_gk(g, 0.0, y_max, 0.1 * tol / wt, std::min(osc, 4000), 400000);
        inner_gk_max = std::max(inner_gk_max, wt * q.error);
        return 2.0 * q.value;
    };

    const Complex u_weight = a.u_weight;
    const auto f = [&, u_weight](double u) -> Complex {
        return std::exp(u_weight * u) * inner_value(u);
    };

    const double range = u_hi - u_lo;
    const int osc_panels =
        static_cast<int>(range * (std::abs(s.s0.imag()) + std::abs(t)) / (2.0 * pi) * 1.2) + 4;
    const num::QuadResult q =
        num::integrate_gk(f, u_lo, u_hi, tol * 0.5, std::min(osc_panels, 4000), cfg.max_evals);

    const Complex f_hi = f(u_hi);
    double tail_hi;
    if (a.abs_alpha == 0.0) {
        tail_hi = std::abs(f_hi) / (sigma2 - 2.0);
    } else {
        const double z_hi =
            2.0 * pi * a.abs_alpha * std::exp(u_hi) * std::sqrt(1.0 + std::exp(2.0 * u_hi));
        tail_hi = std::abs(f_hi) / std::max(1.0, z_hi - a.m1);
    }

    InftyResult out;
    out.value = 2.0 * q.value;
    out.error =
        2.0 * (q.error + tail_lo + tail_hi + (inner_tail_max + inner_gk_max) * range);
    return out;
}

// zeta_p(z) = 1/(1 - p^{-z}) for the matched-Euler-factor diagnostic
Complex euler_factor(long p, Complex z) { return arith::local_zeta(z, p); }

}  // namespace

InftyResult hhat_infty(const PicParam& s, const Rational& alpha, double t,
                       const QuadConfig& cfg) {
    return hhat_infty_core(s, alpha.to_double(), t, cfg);
}

InftyResult hhat_infty(const PicParam& s, double alpha, double t, const QuadConfig& cfg) {
    return hhat_infty_core(s, alpha, t, cfg);
}

DensityConstant peyre_constant(const geom::VarietyModel& model, long prime_cutoff,
                               const QuadConfig& cfg) {
    if (model.picard_rank != 1)
        throw std::invalid_argument("peyre_constant: only rank-one effective cones supported");
    if (prime_cutoff < 5)
        throw std::invalid_argument("peyre_constant: prime cutoff too small");

    long kappa_pic = 0;
    for (size_t j = 0; j < model.kappa.size(); ++j)
        kappa_pic += model.picard_projection.at(0).at(j) * model.kappa[j];
    geom::SimplicialCone ray;
    ray.generators = {{1}};
    DensityConstant out;
    out.cone_factor = geom::cone_laplace(ray, {static_cast<double>(kappa_pic)});

    const PicParam kappa{Complex(static_cast<double>(model.kappa[0]), 0.0),
                         Complex(static_cast<double>(model.kappa[1]), 0.0)};
    out.tau_infinity = hhat_infty(kappa, 0.0, 0.0, cfg).value.real();

    const std::vector<long> primes = arith::primes_up_to(prime_cutoff);
    const double rank = static_cast<double>(model.picard_rank);
    double product = 1.0;
    double delta_a = 0.0, delta_b = 0.0;
    long p_a = 0, p_b = 0;
    for (long p : primes) {
        const double count =
            static_cast<double>(geom::evaluate_point_count(model.total_point_count, p));
        const double density =
            count / std::pow(static_cast<double>(p), static_cast<double>(model.dim));
        const double factor = std::pow(1.0 - 1.0 / static_cast<double>(p), rank) * density;
        product *= factor;
        if (p <= 50) out.first_factors.emplace_back(p, factor);
        p_a = p_b;
        delta_a = delta_b;
        p_b = p;
        delta_b = std::abs(1.0 - factor);
    }
    out.finite_product = product;
    out.value = out.cone_factor * out.tau_infinity * out.finite_product;

    // neglected factors: fit |1 - factor_p| ~ C p^{-q} on the last two primes
    // and close the sum over integers beyond the cutoff
    double q_fit = 3.0;
    if (delta_a > 0 && delta_b > 0 && p_a > 0)
        q_fit = std::log(delta_a / delta_b) /
                std::log(static_cast<double>(p_b) / static_cast<double>(p_a));
    q_fit = std::clamp(q_fit, 1.5, 10.0);
    const double c_fit = delta_b * std::pow(static_cast<double>(p_b), q_fit);
    const double log_tail = c_fit *
                            std::pow(static_cast<double>(prime_cutoff), 1.0 - q_fit) /
                            (q_fit - 1.0);
    out.tail_bound = std::abs(out.value) * std::expm1(log_tail);
    return out;
}

Z0Result z0_constant(const geom::VarietyModel& model, long prime_cutoff,
                     const QuadConfig& cfg) {
    constexpr double eps = 0.3;   // contour depth below the real m-axis
    constexpr double m_cut = 48;  // truncation of the contour integral
    const std::array<double, 3> hs{0.04, 0.02, 0.01};

    QuadConfig acfg = cfg;
    acfg.tolerance = std::min(cfg.tolerance, 1e-10);

    Z0Result out;
    out.h_values = hs;

    // The finite places enter through their matched Euler factors; check that
    // the model's local integrals really are those factors before trusting it.
    {
        const double sigma = 1.0 + hs[0];
        for (double mu : {0.0, 2.0}) {
            const Complex s0p(eps, mu);
            const Complex s2p(3.0 * sigma - eps, -mu);
            Complex prod(1.0, 0.0);
            for (long p : arith::primes_up_to(std::min<long>(prime_cutoff, 50))) {
                const Complex triv =
                    fourier::trivial_integral_p(model, PicParam{s0p, s2p}, p);
                const Complex matched = euler_factor(p, s0p + 1.0) *
                                        euler_factor(p, s2p - 2.0) /
                                        euler_factor(p, s0p + s2p);
                prod *= triv / matched;
            }
            if (std::abs(prod - 1.0) > 1e-9)
                throw std::runtime_error(
                    "z0_constant: model densities do not match the analytic Euler factors");
        }
    }

    for (size_t i = 0; i < hs.size(); ++i) {
        const double h = hs[i];
        const double sigma = 1.0 + h;
        const double zeta3sigma = arith::zeta_analytic(Complex(3.0 * sigma, 0.0)).real();

        // residue of the shifted contour at the height-zeta pole
        const PicParam s_star{Complex(-3.0 * h, 0.0), Complex(6.0 * sigma - 3.0, 0.0)};
        const InftyResult arch_star = hhat_infty(s_star, 0.0, 0.0, acfg);
        const double pole_term =
            arith::zeta_analytic(Complex(3.0 * sigma - 2.0, 0.0)).real() *
            arch_star.value.real() / zeta3sigma;

        double arch_err = arch_star.error;
        const auto integrand = [&](double mu) -> Complex {
            const Complex za = arith::zeta_analytic(Complex(1.0 + eps, mu));
            const Complex zb = arith::zeta_analytic(Complex(3.0 * sigma - 2.0 - eps, -mu));
            const PicParam sm{Complex(-eps, -mu), Complex(3.0 * sigma + eps, mu)};
            const InftyResult arch = hhat_infty(sm, 0.0, 0.0, acfg);
            arch_err = std::max(arch_err, arch.error);
            return za * zb * arch.value / zeta3sigma;
        };
        const num::QuadResult q =
            num::integrate_gk(integrand, 0.0, m_cut, 1e-10, 32, cfg.max_evals);
        const double contour = q.value.real() / pi;

        const double z0 = pole_term + contour;
        out.h_samples[i] = h * z0;
        out.tail_estimate += h * (q.error / pi +
                                  std::abs(integrand(m_cut)) * (2.0 / pi) / pi + arch_err);
    }

    const double r1 = 2.0 * out.h_samples[1] - out.h_samples[0];
    const double r2 = 2.0 * out.h_samples[2] - out.h_samples[1];
    out.constant = (4.0 * r2 - r1) / 3.0;
    return out;
}

Complex z1_term(const PicParam& s, const Rational& alpha, double t, long prime_cutoff,
                const QuadConfig& cfg) {
    if (alpha.is_zero()) throw std::invalid_argument("z1_term: alpha must be nonzero");
    Complex prod(1.0, 0.0);
    for (long p : arith::primes_up_to(prime_cutoff))
        prod *= fourier::hhat_p_twisted(s, alpha, t, p);
    prod *= hhat_infty(s, alpha, t, cfg).value;
    return prod;
}

Z1Partial z1_partial_sum(const PicParam& s, int alpha_range, int t_grid, long prime_cutoff,
                         double t_max, const QuadConfig& cfg) {
    if (alpha_range < 1) throw std::invalid_argument("z1_partial_sum: empty alpha range");
    if (t_grid < 15) throw std::invalid_argument("z1_partial_sum: need at least 15 t-nodes");
    if (!(t_max > 0)) throw std::invalid_argument("z1_partial_sum: t_max must be positive");

    QuadConfig acfg = cfg;
    acfg.tolerance = std::max(cfg.tolerance, 1e-8);

    const std::vector<long> primes = arith::primes_up_to(prime_cutoff);
    std::map<double, Complex> base_cache;  // t -> product of twisted ratios over all p
    const auto base_product = [&](double t) -> Complex {
        auto it = base_cache.find(t);
        if (it != base_cache.end()) return it->second;
        Complex prod(1.0, 0.0);
        const Rational one(1);
        for (long p : primes) prod *= fourier::hhat_p_twisted(s, one, t, p);
        base_cache.emplace(t, prod);
        return prod;
    };

    const int panels = std::max(1, t_grid / 15);
    const long fixed_budget = static_cast<long>(panels) * 15;

    Z1Partial out;
    double quad_err = 0.0;
    std::vector<double> num_sums(static_cast<size_t>(alpha_range) + 1, 0.0);
    std::vector<double> den_sums(static_cast<size_t>(alpha_range) + 1, 0.0);

    for (long gamma = 1; gamma <= alpha_range; ++gamma) {
        for (long beta = 1; beta <= alpha_range; ++beta) {
            if (std::gcd(beta, gamma) != 1) continue;
            const Rational alpha(beta, gamma);
            const std::vector<long> supp = arith::prime_support(mpz_class(beta * gamma));

            const auto val = [&](double t) -> Complex {
                Complex v = base_product(t);
                for (long p : supp)
                    v *= fourier::hhat_p_twisted(s, alpha, t, p) /
                         fourier::hhat_p_twisted(s, Rational(1), t, p);
                v *= hhat_infty(s, alpha, t, acfg).value;
                return v;
            };

            const num::QuadResult q =
                num::integrate_gk(val, 0.0, t_max, 0.0, panels, fixed_budget);
            const double contrib = (2.0 / pi) * q.value.real();
            out.value += contrib;
            quad_err += (2.0 / pi) * q.error;
            out.t_tail += (4.0 / (pi * pi)) * std::abs(val(t_max));
            num_sums[static_cast<size_t>(beta)] += std::abs(contrib);
            den_sums[static_cast<size_t>(gamma)] += std::abs(contrib);
            ++out.terms;
        }
    }
    out.t_tail += quad_err;

    // extrapolate the omitted beta > range and gamma > range rows from the
    // upper half of the computed ones
    const auto fit_tail = [&](const std::vector<double>& sums, double& slope_out) -> double {
        std::vector<double> xs, ys;
        for (long v = alpha_range / 2 + 1; v <= alpha_range; ++v) {
            xs.push_back(static_cast<double>(v));
            ys.push_back(sums[static_cast<size_t>(v)]);
        }
        try {
            const num::LineFit fit = num::fit_loglog(xs, ys, 1e-30);
            slope_out = fit.slope;
            const double q_dec = -fit.slope;
            if (q_dec > 1.05)
                return std::exp(fit.intercept) *
                       std::pow(static_cast<double>(alpha_range), 1.0 - q_dec) / (q_dec - 1.0);
            return sums[static_cast<size_t>(alpha_range)] * static_cast<double>(alpha_range);
        } catch (const std::invalid_argument&) {
            slope_out = 0.0;
            return 0.0;
        }
    };
    out.alpha_tail = fit_tail(num_sums, out.beta_slope) + fit_tail(den_sums, out.gamma_slope);
    return out;
}

}  // namespace hzeta::assembly
