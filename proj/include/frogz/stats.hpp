#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace frogz {

inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
    double lo;
    double hi;
};

/// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ95) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (phat + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    Interval out{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    // guard the point estimate against rounding at the edges
    if (out.lo > phat) out.lo = phat;
    if (out.hi < phat) out.hi = phat;
    return out;
}

inline bool overlaps(const Interval& a, const Interval& b) { return a.lo <= b.hi && b.lo <= a.hi; }

}  // namespace frogz
