#include "frogz/frog.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "frogz/error.hpp"
#include "frogz/parallel.hpp"

namespace frogz {

std::int64_t FrogConfig::effective_reach_cap() const {
    return reach_cap > 0 ? reach_cap : 2 * window;
}

std::uint64_t FrogConfig::effective_step_budget() const {
    if (step_budget > 0) return step_budget;
    const auto cap = static_cast<std::uint64_t>(effective_reach_cap());
    return 10 * cap * cap;
}

void validate(const FrogConfig& config) {
    if (config.window < 1) throw std::invalid_argument("window must be >= 1");
    if (config.reach_cap != 0 && config.reach_cap < 2 * config.window)
        throw std::invalid_argument("reach cap must be at least twice the window");
    validate(config.occupancy);
    validate(config.pi_law);
}

namespace {

struct Span {
    std::int64_t left = 0;
    std::int64_t right = 0;
};

// Everything the closure needs from one vertex's particles.
struct VertexSummary {
    bool sampled = false;
    std::int64_t count = 0;
    std::int64_t left_extent = 0;
    std::int64_t right_extent = 0;
    std::uint64_t covers_root = 0;
    std::int64_t first_left = -1;
    std::uint64_t truncations = 0;
};

class VertexSampler {
public:
    explicit VertexSampler(const FrogConfig& config)
        : config_(config),
          cap_(config.effective_reach_cap()),
          budget_(config.effective_step_budget()) {}

    std::int64_t occupancy(std::int64_t x) const {
        Stream stream(config_.seed.at(x, 0, Purpose::Occupancy));
        return sample_occupancy(config_.occupancy, stream);
    }

    Span particle(std::int64_t x, std::uint64_t i, std::uint64_t& truncations) const {
        const SeedSpec& seed = config_.seed;
        const SurvivalParameter s =
            draw_survival(config_.pi_law, seed.at(x, i, Purpose::SurvivalParameter));
        Stream walk(seed.at(x, i, Purpose::Walk));
        if (config_.engine == EngineKind::MarginalInterval) {
            Stream left(seed.at(x, i, Purpose::LeftMarginal));
            return {std::min(sample_d_right(s, left), cap_), std::min(sample_d_right(s, walk), cap_)};
        }
        const ParticleReach base = config_.sampler == WalkSampler::RangeJump
                                       ? sample_walk_reach(s, cap_, walk)
                                       : simulate_walk_reach(s, budget_, cap_, walk);
        if (base.budget_exhausted) ++truncations;
        switch (config_.engine) {
            case EngineKind::ExactWalk: return {base.d_left, base.d_right};
            case EngineKind::RightOnly: return {0, base.d_right};
            case EngineKind::StarUpper: {
                Stream coupling(seed.at(x, i, Purpose::Coupling));
                const std::int64_t y = couple_star_upper(s, base, cap_, coupling);
                return {y, y};
            }
            case EngineKind::MarginalInterval: break;
        }
        return {base.d_left, base.d_right};
    }

    VertexSummary summarize(std::int64_t x) const {
        VertexSummary v;
        v.sampled = true;
        v.count = occupancy(x);
        for (std::int64_t i = 0; i < v.count; ++i) {
            const Span sp = particle(x, static_cast<std::uint64_t>(i), v.truncations);
            if (i == 0) v.first_left = sp.left;
            v.left_extent = std::max(v.left_extent, sp.left);
            v.right_extent = std::max(v.right_extent, sp.right);
            if (x - sp.left <= 0 && 0 <= x + sp.right) ++v.covers_root;
        }
        return v;
    }

    std::int64_t cap() const { return cap_; }
    std::uint64_t budget() const { return budget_; }

private:
    const FrogConfig& config_;
    std::int64_t cap_;
    std::uint64_t budget_;
};

}  // namespace

ClosureResult run_frog_closure(const FrogConfig& config) {
    validate(config);
    const std::int64_t n = config.window;
    const VertexSampler sampler(config);
    std::vector<VertexSummary> vertices(static_cast<std::size_t>(2 * n + 1));
    auto vertex = [&](std::int64_t x) -> const VertexSummary& {
        auto& v = vertices[static_cast<std::size_t>(x + n)];
        if (!v.sampled) v = sampler.summarize(x);
        return v;
    };

    ClosureResult out;
    std::int64_t lo = 0, hi = 0;
    auto process = [&](std::int64_t x) {
        const VertexSummary& v = vertex(x);
        lo = std::min(lo, std::max(-n, x - v.left_extent));
        hi = std::max(hi, std::min(n, x + v.right_extent));
        out.root_visit_count += v.covers_root;
        out.particles_activated += static_cast<std::uint64_t>(v.count);
        out.truncation_events += v.truncations;
    };

    // Breadth order: each generation handles the vertices activated by the
    // previous one, right side ascending, then left side descending.
    process(0);
    std::int64_t done_lo = 0, done_hi = 0;
    while (lo < done_lo || hi > done_hi) {
        const std::int64_t gen_lo = lo, gen_hi = hi;
        for (std::int64_t x = done_hi + 1; x <= gen_hi; ++x) process(x);
        for (std::int64_t x = done_lo - 1; x >= gen_lo; --x) process(x);
        done_lo = gen_lo;
        done_hi = gen_hi;
        if (!(lo <= done_lo && done_hi <= hi))
            throw std::logic_error("closure lost contiguity of the activated interval");
    }

    out.activated_left = lo;
    out.activated_right = hi;
    out.reached_left_boundary = lo == -n;
    out.reached_right_boundary = hi == n;
    if (config.census) {
        std::uint64_t census = 0;
        for (std::int64_t x = 1; x <= n; ++x) {
            const VertexSummary& v = vertex(x);
            if (v.count >= 1 && v.first_left >= x) ++census;
        }
        out.return_census = census;
    }
    return out;
}

ClosureResult closure_bfs_oracle(const FrogConfig& config) {
    validate(config);
    if (config.engine != EngineKind::ExactWalk)
        throw UnsupportedError("closure_bfs_oracle supports only the exact walk engine");
    const std::int64_t n = config.window;
    const VertexSampler sampler(config);
    const std::int64_t cap = sampler.cap();
    std::vector<char> active(static_cast<std::size_t>(2 * n + 1), 0);
    auto in_window = [n](std::int64_t y) { return y >= -n && y <= n; };

    ClosureResult out;
    std::deque<std::int64_t> queue{0};
    active[static_cast<std::size_t>(n)] = 1;
    std::vector<std::int64_t> visited_set;
    while (!queue.empty()) {
        const std::int64_t x = queue.front();
        queue.pop_front();
        const std::int64_t count = sampler.occupancy(x);
        out.particles_activated += static_cast<std::uint64_t>(count);
        for (std::int64_t i = 0; i < count; ++i) {
            const SurvivalParameter s = draw_survival(
                config.pi_law, config.seed.at(x, static_cast<std::uint64_t>(i), Purpose::SurvivalParameter));
            Stream walk(config.seed.at(x, static_cast<std::uint64_t>(i), Purpose::Walk));
            visited_set.clear();
            bool visits_root = false;
            if (config.sampler == WalkSampler::Stepwise) {
                const ParticleReach r = detail::walk_reach(s, sampler.budget(), cap, walk,
                                                           [&](std::int64_t offset) {
                                                               const std::int64_t y = x + offset;
                                                               if (y == 0) visits_root = true;
                                                               if (in_window(y)) visited_set.push_back(y);
                                                           });
                if (r.budget_exhausted) ++out.truncation_events;
            } else {
                const ParticleReach r = sample_walk_reach(s, cap, walk);
                for (std::int64_t y = x - r.d_left; y <= x + r.d_right; ++y) {
                    if (y == 0) visits_root = true;
                    if (in_window(y)) visited_set.push_back(y);
                }
            }
            if (visits_root) ++out.root_visit_count;
            for (const std::int64_t y : visited_set) {
                auto& flag = active[static_cast<std::size_t>(y + n)];
                if (!flag) {
                    flag = 1;
                    queue.push_back(y);
                }
            }
        }
    }

    std::int64_t lo = 0, hi = 0;
    for (std::int64_t y = -n; y <= n; ++y) {
        if (active[static_cast<std::size_t>(y + n)]) {
            lo = std::min(lo, y);
            hi = std::max(hi, y);
        }
    }
    for (std::int64_t y = lo; y <= hi; ++y) {
        if (!active[static_cast<std::size_t>(y + n)])
            throw std::logic_error("oracle found a non-contiguous activated set");
    }
    out.activated_left = lo;
    out.activated_right = hi;
    out.reached_left_boundary = lo == -n;
    out.reached_right_boundary = hi == n;
    return out;
}

std::vector<ClosureResult> run_replications(const FrogConfig& config, std::uint64_t reps,
                                            unsigned threads) {
    validate(config);
    std::vector<ClosureResult> results(reps);
    parallel_for(reps, threads, [&](std::uint64_t r) {
        FrogConfig local = config;
        local.seed.replication = r;
        results[r] = run_frog_closure(local);
    });
    return results;
}

SurvivalEstimate summarize_survival(std::span<const ClosureResult> runs, std::int64_t window) {
    SurvivalEstimate est;
    est.window = window;
    est.replications = runs.size();
    for (const auto& r : runs)
        if (r.survived()) ++est.survivors;
    est.estimate = runs.empty() ? 0.0
                                : static_cast<double>(est.survivors) / static_cast<double>(runs.size());
    const Interval ci = wilson_interval(est.survivors, est.replications);
    est.ci_lo = ci.lo;
    est.ci_hi = ci.hi;
    return est;
}

SurvivalEstimate estimate_survival(const FrogConfig& config, std::uint64_t reps, unsigned threads) {
    if (reps < 1) throw std::invalid_argument("estimate_survival: replications must be >= 1");
    const auto runs = run_replications(config, reps, threads);
    return summarize_survival(runs, config.window);
}

EngineNestingAudit audit_engine_nesting(const FrogConfig& tmpl, std::uint64_t reps,
                                        unsigned threads) {
    validate(tmpl);
    struct Triple {
        ClosureResult lower, exact, upper;
    };
    std::vector<Triple> runs(reps);
    parallel_for(reps, threads, [&](std::uint64_t r) {
        FrogConfig c = tmpl;
        c.seed.replication = r;
        c.engine = EngineKind::RightOnly;
        runs[r].lower = run_frog_closure(c);
        c.engine = EngineKind::ExactWalk;
        runs[r].exact = run_frog_closure(c);
        c.engine = EngineKind::StarUpper;
        runs[r].upper = run_frog_closure(c);
    });
    auto inside = [](const ClosureResult& a, const ClosureResult& b) {
        return b.activated_left <= a.activated_left && a.activated_right <= b.activated_right;
    };
    EngineNestingAudit audit;
    audit.runs = reps;
    for (const Triple& t : runs) {
        audit.right_only_survived += t.lower.survived();
        audit.exact_survived += t.exact.survived();
        audit.star_upper_survived += t.upper.survived();
        if (t.lower.survived() && !t.exact.survived()) ++audit.right_only_not_exact;
        if (t.exact.survived() && !t.upper.survived()) ++audit.exact_not_star_upper;
        if (!inside(t.lower, t.exact) || !inside(t.exact, t.upper)) ++audit.interval_violations;
    }
    return audit;
}

RecurrenceProfile recurrence_profile(const FrogConfig& tmpl, std::span<const std::int64_t> ladder,
                                     std::uint64_t reps, unsigned threads) {
    if (ladder.empty()) throw std::invalid_argument("recurrence_profile: empty window ladder");
    const std::int64_t largest = *std::max_element(ladder.begin(), ladder.end());
    RecurrenceProfile profile;
    profile.census.assign(reps, std::vector<std::uint64_t>(ladder.size(), 0));
    profile.survived.assign(reps, std::vector<bool>(ladder.size(), false));
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        FrogConfig config = tmpl;
        config.window = ladder[k];
        config.reach_cap = tmpl.reach_cap > 0 ? tmpl.reach_cap : 2 * largest;
        config.census = true;
        const auto runs = run_replications(config, reps, threads);

        RecurrenceRow row;
        row.window = ladder[k];
        row.replications = reps;
        double visits = 0.0, census = 0.0;
        for (std::uint64_t r = 0; r < reps; ++r) {
            profile.census[r][k] = runs[r].return_census.value_or(0);
            profile.survived[r][k] = runs[r].survived();
            if (!runs[r].survived()) continue;
            ++row.survivors;
            visits += static_cast<double>(runs[r].root_visit_count);
            census += static_cast<double>(profile.census[r][k]);
        }
        if (row.survivors > 0) {
            row.mean_root_visits = visits / static_cast<double>(row.survivors);
            row.mean_census = census / static_cast<double>(row.survivors);
        }
        profile.rows.push_back(row);
    }
    return profile;
}

}  // namespace frogz
