#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <variant>

#include "frogz/rng.hpp"

namespace frogz {

/// Sentinel for an infinite mean (not an overflow).
inline constexpr double kInfiniteMean = std::numeric_limits<double>::infinity();

inline bool is_infinite_mean(double m) { return m == kInfiniteMean; }

// ---------------------------------------------------------------------------
// Law of the per-particle survival parameter.

struct PointMass {
    double p;
};

struct BetaLaw {
    double alpha;
    double beta;
};

using PiLaw = std::variant<PointMass, BetaLaw>;

/// Throws std::domain_error unless the law satisfies its invariants.
void validate(const PiLaw& law);
std::string describe(const PiLaw& law);

/// Survival parameter together with its complement. For p close to 1 the
/// complement q = 1 - p carries the precision that p itself has lost.
struct SurvivalParameter {
    double p;
    double q;

    static SurvivalParameter from_p(double p) { return {p, 1.0 - p}; }
    bool immortal() const { return q <= 0.0; }
};

// ---------------------------------------------------------------------------
// Law of the number of particles per vertex.

struct ConstantOccupancy {
    std::int64_t k;
};
struct BernoulliOccupancy {
    double q;
};
struct PoissonOccupancy {
    double lambda;
};
/// P(eta = k) = (1 - s) s^k on {0, 1, ...}. s = 1 is the improper
/// infinite-mean limit: it has a mean and a pgf but cannot be sampled.
struct GeometricOccupancy {
    double s;
};

using OccupancyLaw =
    std::variant<ConstantOccupancy, BernoulliOccupancy, PoissonOccupancy, GeometricOccupancy>;

void validate(const OccupancyLaw& law);
std::string describe(const OccupancyLaw& law);

// ---------------------------------------------------------------------------
// Special functions.

/// B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b).
double beta_function(double alpha, double beta);

double log_beta_function(double alpha, double beta);

/// Beta(alpha, beta) density on the open interval (0, 1).
double beta_pdf(double x, double alpha, double beta);

// ---------------------------------------------------------------------------
// Sampling and generating functions.

double sample_pi(const PiLaw& law, const SeedSpec& seed);
SurvivalParameter draw_survival(const PiLaw& law, const SeedSpec& seed);
SurvivalParameter draw_survival(const PiLaw& law, Stream& stream);

/// Gamma(shape, 1) variate returned as its logarithm, so shapes well below 1
/// do not underflow. Marsaglia-Tsang squeeze with the U^(1/shape) boost.
double sample_log_gamma(double shape, Stream& stream);

double pgf_occupancy(const OccupancyLaw& law, double s);
double mean_occupancy(const OccupancyLaw& law);
double prob_zero_occupancy(const OccupancyLaw& law);
std::int64_t sample_occupancy(const OccupancyLaw& law, const SeedSpec& seed);
std::int64_t sample_occupancy(const OccupancyLaw& law, Stream& stream);

}  // namespace frogz
