#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "frogz/laws.hpp"
#include "frogz/rng.hpp"
#include "frogz/stats.hpp"

namespace frogz {

// ---------------------------------------------------------------------------
// Per-spreader radius laws R. Each is described by its tail n -> P(R >= n).

struct AnalyticTail {
    std::function<double(std::int64_t)> tail;
};
/// P(R >= n) = r^n.
struct GeometricTail {
    double r;
};
/// P(R = 1) = q, P(R = 0) = 1 - q.
struct BernoulliRadius {
    double q;
};
/// P(R >= n) = c / (n + c) for n >= 1, so n P(R >= n) -> c and the
/// single-spreader products decay like n^(-c).
struct PowerLawTail {
    double c;
};
/// Arbitrary seeded sampler; its tail is the empirical tail of a fixed
/// reference sample drawn at construction.
struct EmpiricalSampler {
    std::function<std::int64_t(Stream&)> draw;
    std::shared_ptr<const std::vector<double>> tail_table;
};

using RadiusModel =
    std::variant<AnalyticTail, GeometricTail, BernoulliRadius, PowerLawTail, EmpiricalSampler>;

EmpiricalSampler make_empirical_sampler(std::function<std::int64_t(Stream&)> draw,
                                        std::uint64_t reference_samples, const SeedSpec& seed);

void validate(const RadiusModel& model);
std::string describe(const RadiusModel& model);

double radius_tail(const RadiusModel& model, std::int64_t n);
std::int64_t sample_radius(const RadiusModel& model, Stream& stream);

/// P(I <= i) for I = max of eta spreaders' radii: pgf_eta(1 - P(R >= i + 1)).
double radius_cdf_from_occupancy(const OccupancyLaw& occupancy, const RadiusModel& radius,
                                 std::int64_t i);

/// pmf of I on {0, ..., r_max}; mass above r_max is folded into the top bin,
/// which can only lower the firework reach probability.
std::vector<double> radius_pmf(const OccupancyLaw& occupancy, const RadiusModel& radius,
                               std::int64_t r_max);

/// Vertex radius as a function of the vertex.
using RadiusFn = std::function<std::int64_t(std::int64_t)>;

/// Seed-keyed field z -> I_z = max_{i <= N_z} R_{z,i}; lazily evaluated and
/// reproducible for any order of queries.
class RadiusField {
public:
    RadiusField(OccupancyLaw occupancy, RadiusModel radius, SeedSpec seed);

    std::int64_t operator()(std::int64_t z) const;
    RadiusFn fn() const;

private:
    OccupancyLaw occupancy_;
    RadiusModel radius_;
    SeedSpec seed_;
};

// ---------------------------------------------------------------------------
// Processes on a window.

struct FireworkResult {
    bool reached = false;
    std::int64_t front = 0;                   // clipped at the window
    std::optional<std::int64_t> extinction_step;
    std::vector<std::int64_t> front_trace;    // front after each generation
};

struct BfwResult {
    bool reached_right = false;
    bool reached_left = false;
    std::int64_t left = 0;
    std::int64_t right = 0;
    std::optional<std::int64_t> extinction_step;
    std::vector<std::pair<std::int64_t, std::int64_t>> trace;  // informed interval per generation

    bool reached_any() const { return reached_left || reached_right; }
};

/// One-directional firework on {0, ..., window}.
FireworkResult run_firework(const RadiusFn& radius, std::int64_t window);
FireworkResult run_firework(const OccupancyLaw& occupancy, const RadiusModel& radius,
                            std::int64_t window, const SeedSpec& seed);

/// Bi-directional firework on {-window, ..., window}.
BfwResult run_bfw(const RadiusFn& radius, std::int64_t window);
BfwResult run_bfw(const OccupancyLaw& occupancy, const RadiusModel& radius, std::int64_t window,
                  const SeedSpec& seed);

/// Mirrored bi-directional firework: `radius` is queried only at x >= 0 and
/// the same value is used at -x.
BfwResult run_bfw_star(const RadiusFn& radius, std::int64_t window);
BfwResult run_bfw_star(const OccupancyLaw& occupancy, const RadiusModel& radius,
                       std::int64_t window, const SeedSpec& seed);

enum class RumorProcess { Firework, Bidirectional, Mirrored };
std::string_view to_string(RumorProcess p);
RumorProcess parse_rumor_process(std::string_view name);

struct ProportionEstimate {
    std::uint64_t hits = 0;
    std::uint64_t trials = 0;
    double estimate = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 1.0;
};

ProportionEstimate make_proportion(std::uint64_t hits, std::uint64_t trials);

/// Monte Carlo probability of reaching the window (either side for the
/// two-sided processes); replication r uses seed.replication = r.
ProportionEstimate estimate_rumor_reach(RumorProcess process, const OccupancyLaw& occupancy,
                                        const RadiusModel& radius, std::int64_t window,
                                        std::uint64_t reps, const SeedSpec& seed,
                                        unsigned threads = 1);

/// Exact probability that the firework front reaches `window`, by dynamic
/// programming over the overshoot (front - current vertex).
double fw_reach_probability_dp(std::span<const double> pmf, std::int64_t window);

// ---------------------------------------------------------------------------
// Shared-randomness audit of FW(I) within BFW(I) within FW(I*).

struct RumorCouplingAudit {
    std::uint64_t runs = 0;
    std::uint64_t fw_reached = 0;
    std::uint64_t bfw_reached = 0;
    std::uint64_t fw_star_reached = 0;
    std::uint64_t fw_not_in_bfw = 0;       // FW reached, BFW did not
    std::uint64_t bfw_not_in_fw_star = 0;  // BFW reached, FW(I*) did not
    std::uint64_t set_violations = 0;      // informed sets not nested

    std::uint64_t violations() const { return fw_not_in_bfw + bfw_not_in_fw_star + set_violations; }
};

RumorCouplingAudit audit_rumor_coupling(const OccupancyLaw& occupancy, const RadiusModel& radius,
                                        std::int64_t window, std::uint64_t reps,
                                        const SeedSpec& seed, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Series percolation criteria.

enum class SeriesClass { Converging, Diverging, Inconclusive };
std::string_view to_string(SeriesClass c);

struct SeriesDiagnostic {
    std::int64_t n_max = 0;
    std::vector<double> partial_sums;          // S_n = sum_{m=1}^n prod_{i<=m} P(I <= i), n = 1..n_max
    std::vector<double> squared_partial_sums;  // same with P(I <= i)^2
    double decay_exponent = 0.0;               // log-log slope of the products over the last decade
    SeriesClass classification = SeriesClass::Inconclusive;
    SeriesClass squared_classification = SeriesClass::Inconclusive;
    double tail_liminf_proxy = 0.0;            // min of n P(R >= n) over the last decade
    double tail_limsup_proxy = 0.0;            // max of the same
    double inverse_mean = 0.0;                 // 1 / E(N), 0 when E(N) is infinite

    /// FW percolates with positive probability (the firework iff criterion).
    bool fw_percolation_predicted() const { return classification == SeriesClass::Converging; }
    /// BFW dies out almost surely (the squared-product criterion).
    bool bfw_extinction_certified() const { return squared_classification == SeriesClass::Diverging; }
};

SeriesDiagnostic series_criterion(const OccupancyLaw& occupancy, const RadiusModel& radius,
                                  std::int64_t n_max);

}  // namespace frogz
