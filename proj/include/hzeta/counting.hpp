#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hzeta/heights.hpp"

namespace hzeta::counting {

/**
 * Stream every primitive triple (u0, u1, u2) with u0 >= 1, u2 != 0,
 * gcd(u0, u1, u2) = 1 and (u0^2 + u1^2 + u2^2)^3 <= B^2 — i.e. every rational
 * point of the group whose anticanonical height is at most B, in canonical
 * coordinates — in a fixed deterministic order (u0, then u1, then u2
 * ascending).
 */
void enumerate_points(double height_bound,
                      const std::function<void(const heights::PrimitiveTriple&)>& sink);

/// Number of points of height at most B.  threads = 0 means: use
/// HZETA_THREADS if set, else the hardware concurrency (capped at 16).
std::uint64_t count_points(double height_bound, int threads = 0);

/// Counts for several bounds in one sweep over the largest bound.
std::vector<std::uint64_t> count_points_many(const std::vector<double>& bounds,
                                             int threads = 0);

struct CountSample {
    double bound = 0;
    std::uint64_t count = 0;
};

struct CountFit {
    std::vector<CountSample> samples;
    double constant = 0;              // least-squares c in N(B) ~ c * B
    double max_relative_residual = 0; // max |N - c B| / (c B) over samples
    bool low_confidence = false;      // largest bound too small to trust the fit
};

/// Least-squares fit of N(B) = c * B through the origin over the given
/// bounds.  Throws std::invalid_argument on an empty list or a degenerate
/// (all-equal) set of bounds.
CountFit fit_leading_constant(const std::vector<double>& bounds, int threads = 0);

}  // namespace hzeta::counting
