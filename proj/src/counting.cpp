#include "hzeta/counting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace hzeta::counting {

namespace {

// Largest integer s with s^3 <= B^2, i.e. the largest admissible value of
// u0^2 + u1^2 + u2^2 at height bound B.
long norm_cap(double height_bound) {
    if (!(height_bound >= 0)) return -1;
    const long double b2 = static_cast<long double>(height_bound) * height_bound;
    long s = static_cast<long>(std::cbrt(static_cast<double>(b2)));
    while (static_cast<long double>(s) * s * s > b2) --s;
    while (static_cast<long double>(s + 1) * (s + 1) * (s + 1) <= b2) ++s;
    return s;
}

long isqrt_floor(long n) {
    if (n < 0) return -1;
    long r = static_cast<long>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

int resolve_threads(int threads) {
    if (threads > 0) return std::min(threads, 64);
    if (const char* env = std::getenv("HZETA_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return std::min(t, 64);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::min(hw == 0 ? 1u : hw, 16u));
}

// Visit every admissible (u0, u1, u2) with u0 in the residue class
// [shard] mod [stride]; visitor receives the squared norm.
template <typename Fn>
void scan(long cap, int shard, int stride, Fn&& visit) {
    if (cap < 2) return;
    for (long u0 = 1 + shard; u0 * u0 <= cap; u0 += stride) {
        const long r1 = cap - u0 * u0;
        const long u1_max = isqrt_floor(r1);
        for (long u1 = -u1_max; u1 <= u1_max; ++u1) {
            const long r2 = r1 - u1 * u1;
            const long u2_max = isqrt_floor(r2);
            const long g01 = std::gcd(u0, std::abs(u1));
            for (long u2 = -u2_max; u2 <= u2_max; ++u2) {
                if (u2 == 0) continue;
                if (std::gcd(g01, std::abs(u2)) != 1) continue;
                visit(u0, u1, u2, u0 * u0 + u1 * u1 + u2 * u2);
            }
        }
    }
}

}  // namespace

void enumerate_points(double height_bound,
                      const std::function<void(const heights::PrimitiveTriple&)>& sink) {
    scan(norm_cap(height_bound), 0, 1, [&sink](long u0, long u1, long u2, long) {
        sink(heights::PrimitiveTriple{mpz_class(u0), mpz_class(u1), mpz_class(u2)});
    });
}

std::uint64_t count_points(double height_bound, int threads) {
    const long cap = norm_cap(height_bound);
    const int nt = resolve_threads(threads);
    if (nt <= 1) {
        std::uint64_t n = 0;
        scan(cap, 0, 1, [&n](long, long, long, long) { ++n; });
        return n;
    }
    std::vector<std::uint64_t> partial(static_cast<size_t>(nt), 0);
    std::vector<std::thread> pool;
    for (int w = 0; w < nt; ++w)
        pool.emplace_back([cap, w, nt, &partial] {
            std::uint64_t n = 0;
            scan(cap, w, nt, [&n](long, long, long, long) { ++n; });
            partial[static_cast<size_t>(w)] = n;
        });
    for (auto& th : pool) th.join();
    return std::accumulate(partial.begin(), partial.end(), std::uint64_t{0});
}

std::vector<std::uint64_t> count_points_many(const std::vector<double>& bounds, int threads) {
    if (bounds.empty()) return {};
    // One sweep over the largest bound; each point bumps every bound whose
    // norm cap admits it (caps are sorted; suffix sums at the end).
    std::vector<long> caps;
    caps.reserve(bounds.size());
    for (double b : bounds) caps.push_back(norm_cap(b));
    std::vector<long> sorted_caps = caps;
    std::sort(sorted_caps.begin(), sorted_caps.end());
    const long cap_max = sorted_caps.back();
    const int nt = resolve_threads(threads);

    const size_t nb = bounds.size();
    std::vector<std::vector<std::uint64_t>> hist(static_cast<size_t>(std::max(nt, 1)),
                                                 std::vector<std::uint64_t>(nb, 0));
    auto worker = [&](int w, int stride) {
        auto& h = hist[static_cast<size_t>(w)];
        scan(cap_max, w, stride, [&](long, long, long, long norm) {
            // Number of sorted caps >= norm == points counted for those bounds.
            const size_t idx = static_cast<size_t>(
                std::lower_bound(sorted_caps.begin(), sorted_caps.end(), norm) - sorted_caps.begin());
            if (idx < nb) ++h[idx];
        });
    };
    if (nt <= 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nt; ++w) pool.emplace_back(worker, w, nt);
        for (auto& th : pool) th.join();
    }
    std::vector<std::uint64_t> by_sorted(nb, 0);
    for (const auto& h : hist)
        for (size_t i = 0; i < nb; ++i) by_sorted[i] += h[i];
    // Prefix-sum: count for sorted cap k = all histogram cells with index <= k.
    std::vector<std::uint64_t> cum(nb, 0);
    std::uint64_t run = 0;
    for (size_t i = 0; i < nb; ++i) {
        run += by_sorted[i];
        cum[i] = run;
    }
    std::vector<std::uint64_t> out(nb, 0);
    for (size_t i = 0; i < nb; ++i) {
        const size_t pos = static_cast<size_t>(
            std::lower_bound(sorted_caps.begin(), sorted_caps.end(), caps[i]) - sorted_caps.begin());
        out[i] = cum[pos];
    }
    return out;
}

CountFit fit_leading_constant(const std::vector<double>& bounds, int threads) {
    if (bounds.empty()) throw std::invalid_argument("fit_leading_constant: no bounds");
    for (double b : bounds)
        if (!(b > 0)) throw std::invalid_argument("fit_leading_constant: bounds must be positive");
    const auto [lo, hi] = std::minmax_element(bounds.begin(), bounds.end());
    if (*lo == *hi && bounds.size() > 1)
        throw std::invalid_argument("fit_leading_constant: degenerate bounds");

    CountFit fit;
    const std::vector<std::uint64_t> counts = count_points_many(bounds, threads);
    double sbb = 0, snb = 0;
    for (size_t i = 0; i < bounds.size(); ++i) {
        fit.samples.push_back(CountSample{bounds[i], counts[i]});
        sbb += bounds[i] * bounds[i];
        snb += bounds[i] * static_cast<double>(counts[i]);
    }
    fit.constant = snb / sbb;
    for (const auto& s : fit.samples) {
        const double model = fit.constant * s.bound;
        if (model > 0)
            fit.max_relative_residual =
                std::max(fit.max_relative_residual, std::abs(static_cast<double>(s.count) - model) / model);
    }
    fit.low_confidence = bounds.size() < 3 || *hi < 1e4 || (*hi / *lo) < 4.0;
    return fit;
}

}  // namespace hzeta::counting
