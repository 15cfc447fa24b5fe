#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "frogz/displacement.hpp"
#include "frogz/laws.hpp"
#include "frogz/rng.hpp"
#include "frogz/stats.hpp"

namespace frogz {

/// How ExactWalk / RightOnly / StarUpper obtain the joint walk reach.
enum class WalkSampler {
    RangeJump,  // exact joint law, one range extension per draw
    Stepwise,   // literal step-by-step walk with a step budget
};

struct FrogConfig {
    std::int64_t window = 100;
    EngineKind engine = EngineKind::ExactWalk;
    OccupancyLaw occupancy = ConstantOccupancy{1};
    PiLaw pi_law = BetaLaw{1.0, 0.5};
    std::uint64_t step_budget = 0;  // 0: 10 * window^2
    std::int64_t reach_cap = 0;     // 0: 2 * window
    WalkSampler sampler = WalkSampler::RangeJump;
    SeedSpec seed;                  // replication coordinate selects the realization
    bool census = false;            // also count vertices whose first particle reaches 0

    std::uint64_t effective_step_budget() const;
    std::int64_t effective_reach_cap() const;
};

void validate(const FrogConfig& config);

/// One realization of the closure on [-window, window].
struct ClosureResult {
    std::int64_t activated_left = 0;
    std::int64_t activated_right = 0;
    bool reached_right_boundary = false;
    bool reached_left_boundary = false;
    std::uint64_t root_visit_count = 0;
    std::uint64_t particles_activated = 0;
    std::uint64_t truncation_events = 0;
    /// Vertices x in [1, window] with eta_x >= 1 whose first particle has
    /// d_left >= x; filled only when FrogConfig::census is set.
    std::optional<std::uint64_t> return_census;

    bool survived() const { return reached_left_boundary || reached_right_boundary; }
};

struct SurvivalEstimate {
    double estimate = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 1.0;
    std::uint64_t replications = 0;
    std::uint64_t survivors = 0;
    std::int64_t window = 0;

    Interval ci() const { return {ci_lo, ci_hi}; }
};

ClosureResult run_frog_closure(const FrogConfig& config);

/// Brute-force check of run_frog_closure: materializes each activated
/// vertex's visited set from the same seeded walks and runs a graph search.
/// ExactWalk only.
ClosureResult closure_bfs_oracle(const FrogConfig& config);

/// Runs replications 0..reps-1 (the replication coordinate of config.seed is
/// replaced). Results are ordered by replication index.
std::vector<ClosureResult> run_replications(const FrogConfig& config, std::uint64_t reps,
                                            unsigned threads = 1);

SurvivalEstimate summarize_survival(std::span<const ClosureResult> runs, std::int64_t window);
SurvivalEstimate estimate_survival(const FrogConfig& config, std::uint64_t reps,
                                   unsigned threads = 1);

/// Boundary-reach nesting RightOnly => ExactWalk => StarUpper on shared seeds.
struct EngineNestingAudit {
    std::uint64_t runs = 0;
    std::uint64_t right_only_survived = 0;
    std::uint64_t exact_survived = 0;
    std::uint64_t star_upper_survived = 0;
    std::uint64_t right_only_not_exact = 0;
    std::uint64_t exact_not_star_upper = 0;
    std::uint64_t interval_violations = 0;  // activated intervals not nested

    std::uint64_t violations() const {
        return right_only_not_exact + exact_not_star_upper + interval_violations;
    }
};

/// The engine field of `tmpl` is ignored.
EngineNestingAudit audit_engine_nesting(const FrogConfig& tmpl, std::uint64_t reps,
                                        unsigned threads = 1);

struct RecurrenceRow {
    std::int64_t window = 0;
    std::uint64_t replications = 0;
    std::uint64_t survivors = 0;
    std::optional<double> mean_root_visits;  // among boundary-reaching runs
    std::optional<double> mean_census;       // among boundary-reaching runs
};

struct RecurrenceProfile {
    std::vector<RecurrenceRow> rows;
    /// [replication][ladder index]
    std::vector<std::vector<std::uint64_t>> census;
    std::vector<std::vector<bool>> survived;
};

/// Windows share one reach cap (twice the largest window) so a replication
/// sees the same particles at every rung of the ladder.
RecurrenceProfile recurrence_profile(const FrogConfig& tmpl, std::span<const std::int64_t> ladder,
                                     std::uint64_t reps, unsigned threads = 1);

}  // namespace frogz
