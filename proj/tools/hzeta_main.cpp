// Command-line front end for the height-zeta laboratory.
//
// Subcommands:
//   count     enumerate rational points up to a height bound, CSV output
//   verify    run the built-in identity checks (oracle vs closed forms)
//   igusa     evaluate a two-variable twisted shell sum
//   constant  compare the three routes to the leading constant
//   z1probe   partial oscillatory character sum with tail diagnostics
//   model     dump or validate the variety model as JSON
//
// Exit codes: 0 success, 1 verification/agreement failure, 2 usage or
// configuration error.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hzeta/arith.hpp"
#include "hzeta/assembly.hpp"
#include "hzeta/counting.hpp"
#include "hzeta/fourier.hpp"
#include "hzeta/geometry.hpp"
#include "hzeta/heights.hpp"
#include "hzeta/igusa.hpp"
#include "hzeta/numeric.hpp"

using namespace hzeta;
using arith::Complex;
using heights::PicParam;
using nlohmann::ordered_json;

namespace {

double r12(double v) { return num::round12(v); }

int emit_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
        return 0;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
        std::fprintf(stderr, "error: cannot open output file '%s'\n", out_path.c_str());
        return 2;
    }
    f << text;
    return f.good() ? 0 : 2;
}

int emit_json(const ordered_json& j, const std::string& out_path) {
    return emit_text(j.dump(2) + "\n", out_path);
}

bool parse_pair(const std::string& text, double& a, double& b) {
    std::istringstream is(text);
    char comma = 0;
    if (!(is >> a >> comma >> b) || comma != ',') return false;
    std::string rest;
    is >> rest;
    return rest.empty();
}

std::optional<igusa::ShellRange> parse_range(const std::string& text) {
    if (text == "integers") return igusa::ShellRange::integers();
    if (text == "maximal_ideal" || text == "maximal-ideal")
        return igusa::ShellRange::maximal_ideal();
    // custom "n0:n1,m0:m1" with an empty upper end meaning unbounded
    auto parse_side = [](const std::string& side, int& lo, std::optional<int>& hi) {
        auto colon = side.find(':');
        if (colon == std::string::npos) return false;
        try {
            lo = std::stoi(side.substr(0, colon));
            std::string upper = side.substr(colon + 1);
            if (upper.empty()) hi = std::nullopt;
            else hi = std::stoi(upper);
        } catch (...) {
            return false;
        }
        return true;
    };
    auto comma = text.find(',');
    if (comma == std::string::npos) return std::nullopt;
    igusa::ShellRange r;
    if (!parse_side(text.substr(0, comma), r.n_min, r.n_max)) return std::nullopt;
    if (!parse_side(text.substr(comma + 1), r.m_min, r.m_max)) return std::nullopt;
    return r;
}

// ---------------------------------------------------------------------------
// count
// ---------------------------------------------------------------------------

struct CountOptions {
    double bmax = 0;
    int samples = 6;
    std::string out;
};

int run_count(const CountOptions& opt, int threads) {
    if (opt.samples < 1 || opt.bmax <= 0) {
        std::fprintf(stderr, "error: count needs --bmax > 0 and --samples >= 1\n");
        return 2;
    }
    std::vector<double> bounds;
    for (int j = 0; j < opt.samples; ++j)
        bounds.push_back(opt.bmax / std::pow(2.0, opt.samples - 1 - j));
    auto counts = counting::count_points_many(bounds, threads);

    std::string text = "B,N,N/B\n";
    char buf[128];
    for (size_t i = 0; i < bounds.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%llu,%.12g\n", r12(bounds[i]),
                      static_cast<unsigned long long>(counts[i]),
                      r12(double(counts[i]) / bounds[i]));
        text += buf;
    }
    return emit_text(text, opt.out);
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyOptions {
    std::vector<long> extra_p;
    std::vector<std::string> extra_alpha;
    bool perturb = false;
    std::string out;
};

struct VerifyCase {
    std::string name;
    bool pass = false;
    double measured = 0;
    double allowed = 0;
};

int run_verify(const VerifyOptions& opt, long seed) {
    std::vector<long> plist = {2, 3, 5};
    for (long p : opt.extra_p)
        if (std::find(plist.begin(), plist.end(), p) == plist.end()) {
            if (!arith::is_prime(p)) {
                std::fprintf(stderr, "error: --p %ld is not prime\n", p);
                return 2;
            }
            plist.push_back(p);
        }
    std::vector<Rational> alist;
    for (const char* a : {"1", "2", "1/2", "3", "1/3", "6", "1/6", "4", "1/4"})
        alist.push_back(Rational::parse(a));
    for (const std::string& a : opt.extra_alpha) {
        try {
            alist.push_back(Rational::parse(a));
        } catch (const std::exception&) {
            std::fprintf(stderr, "error: cannot parse --alpha '%s'\n", a.c_str());
            return 2;
        }
    }

    std::vector<VerifyCase> cases;
    auto push = [&](std::string name, double measured, double allowed) {
        cases.push_back({std::move(name), measured <= allowed, measured, allowed});
    };

    // unit-group moments against residue brute force
    for (long p : plist)
        for (int v = -3; v <= 1; ++v) {
            double worst = 0;
            for (long unit : {1L, p + 1L}) {
                Rational x = Rational(unit) * Rational(p).pow(v);
                Complex brute =
                    fourier::monomial_character_moment(x, 1, p, std::max(2, -v + 1));
                worst = std::max(
                    worst, std::abs(brute - Complex(fourier::unit_character_moment(x, p)
                                                        .to_double(),
                                                    0)));
            }
            push("moment p=" + std::to_string(p) + " v=" + std::to_string(v), worst, 1e-12);
        }

    // quadratic moments one level down: Gauss modulus family
    for (long p : plist) {
        if (p == 2) continue;
        std::vector<double> family = {(std::sqrt(double(p)) - 1) / double(p - 1),
                                      (std::sqrt(double(p)) + 1) / double(p - 1),
                                      std::sqrt(double(p + 1)) / double(p - 1)};
        for (long u : {1L, 2L}) {
            Complex m = fourier::monomial_character_moment(Rational(u, p), 2, p, 2);
            double best = 1e9;
            for (double f : family) best = std::min(best, std::abs(std::abs(m) - f));
            push("gauss p=" + std::to_string(p) + " u=" + std::to_string(u), best, 1e-8);
        }
    }

    // deep coprime powers average to zero
    for (long p : plist) {
        long d = (p == 3) ? 4 : 3;
        Complex m = fourier::monomial_character_moment(
            Rational(1) / Rational(p).pow(2), d, p, 4);
        push("vanishing p=" + std::to_string(p) + " d=" + std::to_string(d), std::abs(m),
             1e-12);
    }

    // shell-sum oracle against the closed transform
    bool perturb_pending = opt.perturb;
    const std::pair<double, double> sgrid[] = {{0.5, 1.0}, {0.5, 2.0}, {1.2, 1.0}, {1.2, 2.0}};
    for (long p : plist)
        for (const Rational& alpha : alist)
            for (auto [a, b] : sgrid) {
                PicParam s{a, b};
                auto cfg = fourier::OracleConfig::automatic(p, alpha, s, 5e-7, true);
                auto oracle = fourier::hhat_p_oracle(s, alpha, p, cfg);
                Complex closed = fourier::hhat_p_closed(s, alpha, p);
                if (perturb_pending) {
                    closed *= 1.0 + 1e-4;  // deliberate corruption: exactly one case
                    perturb_pending = false;
                }
                std::ostringstream name;
                name << "oracle p=" << p << " alpha=" << alpha.str() << " s=(" << a << "," << b
                     << ")";
                push(name.str(), std::abs(oracle.value - closed),
                     oracle.error_bound + 1e-9);
            }

    // exact scaling in the valuation
    for (long p : plist)
        for (long k : {1L, 2L, 3L}) {
            Rational X(1, 7), Y(1, 11);
            bool equal = fourier::hhat_p_closed_exact(p, -k, X, Y) ==
                         (X / Rational(p)).pow(k) * fourier::hhat_p_closed_exact(p, 0, X, Y);
            push("scaling p=" + std::to_string(p) + " k=" + std::to_string(k),
                 equal ? 0.0 : 1.0, 0.0);
        }

    // stratification formula: exact zeta ratio, then the independent oracle
    auto model = geom::builtin_plane_model();
    auto zeta_exact = [](long p, long z) {
        Rational pz = Rational(p).pow(z);
        return pz / (pz - Rational(1));
    };
    for (long p : plist) {
        bool equal = true;
        for (auto [a, b] : {std::pair<long, long>{1, 1}, {1, 2}}) {
            equal = equal && fourier::trivial_integral_exact(model, p, a, b) ==
                                 zeta_exact(p, a + 1) * zeta_exact(p, b + 1) /
                                     zeta_exact(p, a + b + 3);
        }
        push("strata p=" + std::to_string(p), equal ? 0.0 : 1.0, 0.0);
    }
    for (long p : {2L, 3L}) {
        PicParam s{1.0, 5.0};
        auto cfg = fourier::OracleConfig::automatic(p, Rational(1), s, 1e-7, false);
        auto oracle = fourier::trivial_integral_oracle(s, p, cfg);
        Complex closed = fourier::trivial_integral_p(model, s, p);
        push("strata-oracle p=" + std::to_string(p), std::abs(oracle.value - closed),
             oracle.error_bound + 1e-9);
    }

    // two-variable shell sums: frozen values and the survivor strip
    {
        auto geometric = igusa::eta_eval(
            igusa::MonomialSum{3, 1, 1, Rational(1), igusa::ShellRange::maximal_ideal()},
            Complex(1, 0), Complex(1, 0), 1e-10);
        push("igusa geometric", std::abs(geometric.value - Complex(0.25, 0)), 1e-9);

        auto finite = igusa::eta_eval(
            igusa::MonomialSum{2, -1, -1, Rational(1), igusa::ShellRange::integers()},
            Complex(0.5, 0), Complex(0.5, 0), 1e-10);
        push("igusa finite-shells", std::abs(finite.value - Complex(1 - std::sqrt(2.0), 0)),
             1e-9);

        auto strip = igusa::eta_eval(
            igusa::MonomialSum{3, -2, 1, Rational(1, 27), igusa::ShellRange::integers()},
            Complex(0.5, 0), Complex(0.5, 0), 1e-8);
        long bad = 0;
        for (auto [n, m] : strip.survivor_shells)
            if (2 * n - m > -2) ++bad;
        push("igusa survivor-strip", double(bad), 0.0);
    }

    long failed = 0;
    ordered_json jcases = ordered_json::array();
    for (const auto& c : cases) {
        if (!c.pass) ++failed;
        jcases.push_back({{"name", c.name},
                          {"status", c.pass ? "pass" : "fail"},
                          {"measured", r12(c.measured)},
                          {"allowed", r12(c.allowed)}});
    }
    ordered_json j;
    j["command"] = "verify";
    j["seed"] = seed;
    j["perturbed"] = opt.perturb;
    j["total"] = cases.size();
    j["failed"] = failed;
    j["cases"] = jcases;
    int rc = emit_json(j, opt.out);
    if (rc != 0) return rc;
    return failed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// igusa
// ---------------------------------------------------------------------------

struct IgusaOptions {
    long p = 3;
    long d = -1;
    long e = -1;
    std::string alpha = "1";
    std::string s = "1,1";
    std::string range = "integers";
    double tol = 1e-8;
    std::string out;
};

int run_igusa(const IgusaOptions& opt, long seed) {
    double s1 = 0, s2 = 0;
    if (!parse_pair(opt.s, s1, s2)) {
        std::fprintf(stderr, "error: --s expects 's1,s2'\n");
        return 2;
    }
    auto range = parse_range(opt.range);
    if (!range) {
        std::fprintf(stderr,
                     "error: --range expects 'integers', 'maximal_ideal', or 'n0:n1,m0:m1'\n");
        return 2;
    }
    Rational alpha;
    try {
        alpha = Rational::parse(opt.alpha);
    } catch (const std::exception&) {
        std::fprintf(stderr, "error: cannot parse --alpha '%s'\n", opt.alpha.c_str());
        return 2;
    }
    igusa::MonomialSum spec{opt.p, opt.d, opt.e, alpha, *range};
    auto r = igusa::eta_eval(spec, Complex(s1, 0), Complex(s2, 0), opt.tol);

    ordered_json j;
    j["command"] = "igusa";
    j["seed"] = seed;
    j["p"] = opt.p;
    j["d"] = opt.d;
    j["e"] = opt.e;
    j["alpha"] = alpha.str();
    j["s"] = {r12(s1), r12(s2)};
    j["range"] = opt.range;
    j["value"] = {r12(r.value.real()), r12(r.value.imag())};
    j["tail_bound"] = r12(r.tail_bound);
    j["shells"] = r.shells;
    j["survivors"] = r.survivors;
    j["max_n"] = r.max_n;
    j["max_m"] = r.max_m;
    ordered_json shells = ordered_json::array();
    for (size_t i = 0; i < r.survivor_shells.size() && i < 64; ++i)
        shells.push_back({r.survivor_shells[i].first, r.survivor_shells[i].second});
    j["survivor_shells"] = shells;
    return emit_json(j, opt.out);
}

// ---------------------------------------------------------------------------
// constant
// ---------------------------------------------------------------------------

struct ConstantOptions {
    long pcut = 100000;
    double bempirical = 1e6;
    std::string out;
};

int run_constant(const ConstantOptions& opt, int threads, long seed) {
    auto model = geom::builtin_plane_model();
    auto z0 = assembly::z0_constant(model, opt.pcut);
    auto peyre = assembly::peyre_constant(model, opt.pcut);
    auto n = counting::count_points(opt.bempirical, threads);
    double c_euler = z0.constant;
    double c_peyre = peyre.value;
    double c_emp = double(n) / opt.bempirical;

    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(a, b); };
    double r_ep = rel(c_euler, c_peyre);
    double r_pe = rel(c_peyre, c_emp);
    double r_ee = rel(c_euler, c_emp);
    bool agree = r_ep <= 0.05 && r_pe <= 0.05 && r_ee <= 0.05;
    double tail_rel = peyre.value > 0 ? peyre.tail_bound / peyre.value : 1.0;

    ordered_json j;
    j["command"] = "constant";
    j["seed"] = seed;
    j["prime_cutoff"] = opt.pcut;
    j["empirical_bound"] = r12(opt.bempirical);
    j["c_euler"] = r12(c_euler);
    j["c_peyre"] = r12(c_peyre);
    j["c_empirical"] = r12(c_emp);
    j["relative_differences"] = {{"euler_vs_peyre", r12(r_ep)},
                                 {"peyre_vs_empirical", r12(r_pe)},
                                 {"euler_vs_empirical", r12(r_ee)}};
    j["agreement_within_5pct"] = agree;
    j["short_euler_product_warning"] = tail_rel > 1e-6;
    j["details"] = {{"cone_factor", r12(peyre.cone_factor)},
                    {"tau_infinity", r12(peyre.tau_infinity)},
                    {"finite_product", r12(peyre.finite_product)},
                    {"peyre_tail_bound", r12(peyre.tail_bound)},
                    {"z0_h_values", {r12(z0.h_values[0]), r12(z0.h_values[1]), r12(z0.h_values[2])}},
                    {"z0_h_samples",
                     {r12(z0.h_samples[0]), r12(z0.h_samples[1]), r12(z0.h_samples[2])}},
                    {"z0_tail_estimate", r12(z0.tail_estimate)},
                    {"empirical_count", n}};
    int rc = emit_json(j, opt.out);
    if (rc != 0) return rc;
    return agree ? 0 : 1;
}

// ---------------------------------------------------------------------------
// z1probe
// ---------------------------------------------------------------------------

struct Z1Options {
    std::string s = "2.2,1.0";
    int alpharange = 50;
    int tgrid = 64;
    long pcut = 100;
    double tmax = 12.0;
    std::string out;
};

int run_z1probe(const Z1Options& opt, long seed) {
    double s0 = 0, s2 = 0;
    if (!parse_pair(opt.s, s0, s2)) {
        std::fprintf(stderr, "error: --s expects 's0,s2'\n");
        return 2;
    }
    auto z1 = assembly::z1_partial_sum(PicParam{s0, s2}, opt.alpharange, opt.tgrid, opt.pcut,
                                       opt.tmax);
    bool summable = z1.beta_slope <= -1.001 && z1.gamma_slope <= -1.001;

    ordered_json j;
    j["command"] = "z1probe";
    j["seed"] = seed;
    j["s"] = {r12(s0), r12(s2)};
    j["alpha_range"] = opt.alpharange;
    j["t_grid"] = opt.tgrid;
    j["prime_cutoff"] = opt.pcut;
    j["t_max"] = r12(opt.tmax);
    j["value"] = r12(z1.value);
    j["alpha_tail"] = r12(z1.alpha_tail);
    j["t_tail"] = r12(z1.t_tail);
    j["beta_slope"] = r12(z1.beta_slope);
    j["gamma_slope"] = r12(z1.gamma_slope);
    j["terms"] = z1.terms;
    j["summable"] = summable;
    int rc = emit_json(j, opt.out);
    if (rc != 0) return rc;
    return summable ? 0 : 1;
}

// ---------------------------------------------------------------------------
// model
// ---------------------------------------------------------------------------

int run_model_dump(const std::string& out) {
    return emit_json(geom::model_to_json(geom::builtin_plane_model()), out);
}

int run_model_validate(const std::string& in, const std::string& out) {
    std::ifstream f(in, std::ios::binary);
    if (!f) {
        std::fprintf(stderr, "error: cannot read '%s'\n", in.c_str());
        return 2;
    }
    ordered_json parsed;
    geom::VarietyModel model;
    try {
        f >> parsed;
        model = geom::model_from_json(parsed);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: malformed model file: %s\n", e.what());
        return 2;
    }
    auto report = geom::validate_model(model);
    ordered_json j;
    j["command"] = "model-validate";
    j["file"] = in;
    j["ok"] = report.ok();
    j["violations"] = report.violations;
    j["warnings"] = report.warnings;
    int rc = emit_json(j, out);
    if (rc != 0) return rc;
    return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for height zeta functions of the compactified ax+b group"};
    app.set_config("--config", "", "read options from an INI-style file");
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = HZETA_THREADS or hardware)");
    long seed = 0;
    app.add_option("--seed", seed, "seed echoed into reports");

    CountOptions copt;
    auto* count = app.add_subcommand("count", "count rational points of bounded height");
    count->add_option("--bmax", copt.bmax, "largest height bound")->required();
    count->add_option("--samples", copt.samples, "number of doubling steps up to bmax");
    count->add_option("--out", copt.out, "output file (default stdout)");

    VerifyOptions vopt;
    auto* verify = app.add_subcommand("verify", "run the built-in identity checks");
    verify->add_option("--p", vopt.extra_p, "extra primes to include");
    verify->add_option("--alpha", vopt.extra_alpha, "extra frequencies to include");
    verify->add_option("--out", vopt.out, "output file (default stdout)");
    verify->add_flag("--perturb", vopt.perturb)->group("");

    IgusaOptions iopt;
    auto* ig = app.add_subcommand("igusa", "evaluate a twisted two-variable shell sum");
    ig->add_option("--p", iopt.p, "prime");
    ig->add_option("--d", iopt.d, "exponent of the first unit coordinate");
    ig->add_option("--e", iopt.e, "exponent of the second unit coordinate");
    ig->add_option("--alpha", iopt.alpha, "frequency (rational, e.g. 1/27)");
    ig->add_option("--s", iopt.s, "parameter pair 's1,s2'");
    ig->add_option("--range", iopt.range, "integers | maximal_ideal | n0:n1,m0:m1");
    ig->add_option("--tol", iopt.tol, "absolute tolerance");
    ig->add_option("--out", iopt.out, "output file (default stdout)");

    ConstantOptions kopt;
    auto* konst = app.add_subcommand("constant", "compare the three leading-constant routes");
    konst->add_option("--pcut", kopt.pcut, "Euler product cutoff");
    konst->add_option("--bempirical", kopt.bempirical, "height bound for the empirical count");
    konst->add_option("--out", kopt.out, "output file (default stdout)");

    Z1Options zopt;
    auto* z1 = app.add_subcommand("z1probe", "partial oscillatory character sum");
    z1->add_option("--s", zopt.s, "parameter pair 's0,s2'");
    z1->add_option("--alpharange", zopt.alpharange, "numerator/denominator cutoff");
    z1->add_option("--tgrid", zopt.tgrid, "twist-integral grid size (multiple of 15)");
    z1->add_option("--pcut", zopt.pcut, "Euler product cutoff per term");
    z1->add_option("--tmax", zopt.tmax, "twist-integral truncation");
    z1->add_option("--out", zopt.out, "output file (default stdout)");

    std::string model_out, model_in;
    auto* model = app.add_subcommand("model", "dump or validate the variety model");
    model->require_subcommand(1);
    auto* mdump = model->add_subcommand("dump", "print the built-in model as JSON");
    mdump->add_option("--out", model_out, "output file (default stdout)");
    auto* mval = model->add_subcommand("validate", "validate a model JSON file");
    mval->add_option("--in", model_in, "model JSON file")->required();
    mval->add_option("--out", model_out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (count->parsed()) return run_count(copt, threads);
        if (verify->parsed()) return run_verify(vopt, seed);
        if (ig->parsed()) return run_igusa(iopt, seed);
        if (konst->parsed()) return run_constant(kopt, threads, seed);
        if (z1->parsed()) return run_z1probe(zopt, seed);
        if (model->parsed()) {
            if (mdump->parsed()) return run_model_dump(model_out);
            if (mval->parsed()) return run_model_validate(model_in, model_out);
        }
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
