#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "frogz/displacement.hpp"
#include "frogz/frog.hpp"
#include "frogz/laws.hpp"

namespace frogz {

/// Where (alpha, beta, E(eta)) falls in the proven phase diagram.
enum class TheoremTag { TheoremExtinct, TheoremSurvive, Unknown };
std::string_view to_string(TheoremTag t);

TheoremTag classify_cell(double alpha, double beta, const OccupancyLaw& occupancy);

/// inf{alpha > 0 : B(alpha, 1/2) < mean_eta * sqrt(2)}; 0 for an infinite mean.
double alpha0(double mean_eta);

/// Log-spaced integer grid from `from` to `to` with `per_decade` points per decade.
std::vector<std::int64_t> log_grid(std::int64_t from, std::int64_t to, int per_decade = 1);

enum class Trend { Increasing, Decreasing, Flat, Mixed };
std::string_view to_string(Trend t);

struct ScaledTailCurve {
    std::vector<std::int64_t> n;
    std::vector<double> value;     // n P(D-> >= n)
    Trend trend = Trend::Mixed;
    double terminal_slope = 0.0;   // d log(value) / d log n over the last decade of the grid
};

ScaledTailCurve scaled_tail_curve(double alpha, double beta, std::span<const std::int64_t> grid);

enum class Verdict { SurvivalCriterionMet, ExtinctionCriterionMet, Indeterminate };
std::string_view to_string(Verdict v);

struct CriterionReport {
    std::vector<std::int64_t> n;
    std::vector<double> scaled_right;       // n P(D-> >= n)
    std::vector<double> scaled_star_bound;  // n min(1, 2 P(D-> >= n)) >= n P(D* >= n)
    double survival_threshold = 0.0;        // 1 / E(eta)
    double extinction_threshold = 0.0;      // 1 / (2 E(eta))
    double terminal_slope = 0.0;
    Verdict verdict = Verdict::Indeterminate;
    std::string note;
};

CriterionReport criterion_check(double alpha, double beta, const OccupancyLaw& occupancy,
                                std::span<const std::int64_t> grid);

struct PhaseCell {
    double alpha = 0.0;
    double beta = 0.0;
    std::int64_t window = 0;
    std::uint64_t replications = 0;
    SurvivalEstimate estimate;
    EngineKind engine = EngineKind::ExactWalk;
    TheoremTag tag = TheoremTag::Unknown;
};

struct PhaseDiagramSpec {
    std::vector<double> alphas;
    std::vector<double> betas;
    OccupancyLaw occupancy = ConstantOccupancy{1};
    std::vector<std::int64_t> windows{100, 1000, 10000};
    std::uint64_t replications = 1000;
    EngineKind engine = EngineKind::ExactWalk;
    std::uint64_t master_seed = 0;
};

/// Rows ordered by (alpha, beta, window) in grid order. All windows of a cell
/// share the seed and the reach cap, so each replication is nested across
/// the ladder.
std::vector<PhaseCell> phase_diagram(const PhaseDiagramSpec& spec, unsigned threads = 1);

}  // namespace frogz
