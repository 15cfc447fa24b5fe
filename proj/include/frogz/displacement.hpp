#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "frogz/laws.hpp"
#include "frogz/rng.hpp"

namespace frogz {

/// Returned by the direct samplers when p = 1 (the walk never dies).
inline constexpr std::int64_t kUnboundedReach = std::numeric_limits<std::int64_t>::max();

/// Joint leftward/rightward maximal displacement of one particle.
/// A truncated side means the stored value is only a lower bound: the side was
/// clipped at the sampling cap, or the step budget ran out first.
struct ParticleReach {
    std::int64_t d_right = 0;
    std::int64_t d_left = 0;
    std::int64_t d_star = 0;
    bool truncated_right = false;
    bool truncated_left = false;
    bool budget_exhausted = false;
    std::uint64_t steps_used = 0;
};

/// How a frog-model particle turns its randomness into a visited interval.
///  - ExactWalk:        joint (D<-, D->) of the actual killed walk.
///  - MarginalInterval: independent D<- and D-> with the exact marginals.
///  - RightOnly:        D-> of the walk, D<- forced to 0 (lower bound).
///  - StarUpper:        both sides set to a draw from the tail min(1, 2 r^n),
///                      coupled to dominate the walk's D* (upper bound).
enum class EngineKind { ExactWalk, MarginalInterval, RightOnly, StarUpper };

std::string_view to_string(EngineKind e);
EngineKind parse_engine(std::string_view name);

/// r(p) = (1 - sqrt(1 - p^2)) / p, the per-level tail ratio of D->.
double tail_ratio(double p);
double tail_ratio(SurvivalParameter s);

/// theta with cosh(theta) = 1/p, so r(p) = exp(-theta). Zero for p = 1.
double decay_rate(SurvivalParameter s);

/// Exact P(D* >= n | p) = 1 / cosh(n theta).
double d_star_tail(SurvivalParameter s, std::int64_t n);

/// D-> by inverse transform on the geometric tail r^n.
std::int64_t sample_d_right(double p, const SeedSpec& seed);
std::int64_t sample_d_right(SurvivalParameter s, Stream& stream);

/// Draw from the law with tail min(1, 2 r^n) (a stochastic upper bound for D*).
std::int64_t sample_d_star_upper(double p, const SeedSpec& seed);

/// Inverse of the tail n -> min(1, 2 r^n) at upper-tail mass u in (0, 1].
std::int64_t star_upper_quantile(SurvivalParameter s, double u);

/// Step-by-step killed walk. Stops at death, once both running maxima reach
/// `window`, or when `step_budget` jumps have been made.
ParticleReach simulate_walk_reach(double p, std::uint64_t step_budget, std::int64_t window,
                                  const SeedSpec& seed);
ParticleReach simulate_walk_reach(SurvivalParameter s, std::uint64_t step_budget,
                                  std::int64_t window, Stream& stream);

/// Same joint law as the step walk, sampled one range extension at a time:
/// the cost is O(d_left + d_right) rather than O(lifetime). Sides are clipped
/// at `cap`.
ParticleReach sample_walk_reach(SurvivalParameter s, std::int64_t cap, Stream& stream);

/// Pathwise-dominating partner of a walk's D*: distributional transform of the
/// observed D* under its exact law, pushed through the quantile of the
/// min(1, 2 r^n) law. Returns a value >= the observed D* and clips at `cap`.
std::int64_t couple_star_upper(SurvivalParameter s, const ParticleReach& reach, std::int64_t cap,
                               Stream& stream);

/// P(D-> >= n) when p ~ Beta(alpha, beta), by adaptive quadrature.
double tail_d_right_beta(std::int64_t n, double alpha, double beta);

namespace detail {

// Walk kernel shared by simulate_walk_reach and the closure oracle, which
// records every visited offset through `visit`.
template <class Visit>
ParticleReach walk_reach(SurvivalParameter s, std::uint64_t step_budget, std::int64_t window,
                         Stream& stream, Visit&& visit) {
    ParticleReach out;
    std::int64_t pos = 0;
    visit(pos);
    while (out.d_right < window || out.d_left < window) {
        if (out.steps_used >= step_budget) {
            out.budget_exhausted = true;
            break;
        }
        // die with probability 1 - p before each jump
        if (stream.uniform() < s.q) break;
        pos += (stream() >> 63) ? 1 : -1;
        ++out.steps_used;
        visit(pos);
        if (pos > out.d_right) out.d_right = pos;
        if (-pos > out.d_left) out.d_left = -pos;
    }
    out.d_right = std::min(out.d_right, window);
    out.d_left = std::min(out.d_left, window);
    out.truncated_right = out.d_right >= window || out.budget_exhausted;
    out.truncated_left = out.d_left >= window || out.budget_exhausted;
    out.d_star = std::max(out.d_right, out.d_left);
    return out;
}

}  // namespace detail

}  // namespace frogz
