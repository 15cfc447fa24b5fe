#include "frogz/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace frogz {

std::string_view to_string(TheoremTag t) {
    switch (t) {
        case TheoremTag::TheoremExtinct: return "theorem-extinct";
        case TheoremTag::TheoremSurvive: return "theorem-survive";
        case TheoremTag::Unknown: return "unknown";
    }
    return "?";
}

std::string_view to_string(Trend t) {
    switch (t) {
        case Trend::Increasing: return "increasing";
        case Trend::Decreasing: return "decreasing";
        case Trend::Flat: return "flat";
        case Trend::Mixed: return "mixed";
    }
    return "?";
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::SurvivalCriterionMet: return "survival-criterion-met";
        case Verdict::ExtinctionCriterionMet: return "extinction-criterion-met";
        case Verdict::Indeterminate: return "indeterminate";
    }
    return "?";
}

double alpha0(double mean_eta) {
    if (!(mean_eta > 0.0)) throw std::domain_error("alpha0: mean occupancy must be positive");
    if (is_infinite_mean(mean_eta)) return 0.0;
    const double target = mean_eta * std::sqrt(2.0);
    // B(., 1/2) decreases from +inf to 0; bisect in log(alpha).
    double lo = -1.0, hi = 1.0;
    while (beta_function(std::exp(lo), 0.5) < target) lo -= 1.0;
    while (beta_function(std::exp(hi), 0.5) >= target) hi += 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (beta_function(std::exp(mid), 0.5) < target)
            hi = mid;
        else
            lo = mid;
    }
    return std::exp(hi);
}

TheoremTag classify_cell(double alpha, double beta, const OccupancyLaw& occupancy) {
    const double mean = mean_occupancy(occupancy);
    if (prob_zero_occupancy(occupancy) >= 1.0) return TheoremTag::TheoremExtinct;
    if (beta > 0.5) return is_infinite_mean(mean) ? TheoremTag::Unknown : TheoremTag::TheoremExtinct;
    if (beta < 0.5) return TheoremTag::TheoremSurvive;
    return alpha > alpha0(mean) ? TheoremTag::TheoremSurvive : TheoremTag::Unknown;
}

std::vector<std::int64_t> log_grid(std::int64_t from, std::int64_t to, int per_decade) {
    if (from < 1 || to < from || per_decade < 1)
        throw std::invalid_argument("log_grid: need 1 <= from <= to and per_decade >= 1");
    std::vector<std::int64_t> out;
    const double a = std::log10(static_cast<double>(from));
    const double b = std::log10(static_cast<double>(to));
    const int steps = static_cast<int>(std::ceil((b - a) * per_decade - 1e-9));
    for (int k = 0; k <= steps; ++k) {
        const double e = std::min(b, a + static_cast<double>(k) / per_decade);
        const auto n = static_cast<std::int64_t>(std::llround(std::pow(10.0, e)));
        if (out.empty() || n > out.back()) out.push_back(n);
    }
    return out;
}

namespace {

// Slope of log(value) on log(n) over the points with n >= n_last / 10.
double terminal_slope(std::span<const std::int64_t> n, std::span<const double> v) {
    if (n.size() < 2) return 0.0;
    const double last = static_cast<double>(n.back());
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (static_cast<double>(n[i]) * 10.0 < last * (1.0 - 1e-12)) continue;
        if (!(v[i] > 0.0)) continue;
        xs.push_back(std::log(static_cast<double>(n[i])));
        ys.push_back(std::log(v[i]));
    }
    if (xs.size() < 2) {
        xs.clear();
        ys.clear();
        for (std::size_t i = n.size() - 2; i < n.size(); ++i) {
            if (!(v[i] > 0.0)) return v.back() > v[n.size() - 2] ? 1.0 : -1.0;
            xs.push_back(std::log(static_cast<double>(n[i])));
            ys.push_back(std::log(v[i]));
        }
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

Trend trend_of(std::span<const double> v) {
    if (v.size() < 2) return Trend::Flat;
    bool up = true, down = true, flat = true;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) up = false;
        if (!(v[i] < v[i - 1])) down = false;
        if (std::abs(v[i] - v[i - 1]) > 1e-3 * std::max(std::abs(v[i - 1]), 1e-300)) flat = false;
    }
    if (flat) return Trend::Flat;
    if (up) return Trend::Increasing;
    if (down) return Trend::Decreasing;
    return Trend::Mixed;
}

constexpr double kTrendSlope = 0.05;

}  // namespace

ScaledTailCurve scaled_tail_curve(double alpha, double beta, std::span<const std::int64_t> grid) {
    if (grid.empty()) throw std::invalid_argument("scaled_tail_curve: empty grid");
    ScaledTailCurve c;
    for (const std::int64_t n : grid) {
        if (n < 1) throw std::invalid_argument("scaled_tail_curve: grid values must be >= 1");
        c.n.push_back(n);
        c.value.push_back(static_cast<double>(n) * tail_d_right_beta(n, alpha, beta));
    }
    c.trend = trend_of(c.value);
    c.terminal_slope = terminal_slope(c.n, c.value);
    return c;
}

CriterionReport criterion_check(double alpha, double beta, const OccupancyLaw& occupancy,
                                std::span<const std::int64_t> grid) {
    validate(occupancy);
    const ScaledTailCurve curve = scaled_tail_curve(alpha, beta, grid);
    CriterionReport rep;
    rep.n = curve.n;
    rep.scaled_right = curve.value;
    for (std::size_t i = 0; i < curve.n.size(); ++i) {
        const double nd = static_cast<double>(curve.n[i]);
        rep.scaled_star_bound.push_back(nd * std::min(1.0, 2.0 * curve.value[i] / nd));
    }
    const double mean = mean_occupancy(occupancy);
    const bool infinite = is_infinite_mean(mean);
    rep.survival_threshold = infinite ? 0.0 : 1.0 / mean;
    rep.extinction_threshold = infinite ? 0.0 : 1.0 / (2.0 * mean);
    rep.terminal_slope = curve.terminal_slope;

    const double last_n = static_cast<double>(curve.n.back());
    double min_right = std::numeric_limits<double>::infinity();
    double max_star = 0.0;
    for (std::size_t i = 0; i < curve.n.size(); ++i) {
        if (static_cast<double>(curve.n[i]) * 10.0 < last_n * (1.0 - 1e-12)) continue;
        min_right = std::min(min_right, rep.scaled_right[i]);
        max_star = std::max(max_star, rep.scaled_star_bound[i]);
    }

    const double s = rep.terminal_slope;
    const bool survival = s > kTrendSlope || (s >= -kTrendSlope && min_right > rep.survival_threshold);
    const bool extinction =
        !infinite && (s < -kTrendSlope || (s <= kTrendSlope && max_star < rep.extinction_threshold));
    if (survival && !extinction) {
        rep.verdict = Verdict::SurvivalCriterionMet;
        rep.note = "n P(D-> >= n) stays above 1/E(eta) on the terminal decade";
    } else if (extinction && !survival) {
        rep.verdict = Verdict::ExtinctionCriterionMet;
        rep.note = "the D* bound n min(1, 2 P(D-> >= n)) stays below 1/(2 E(eta)) on the terminal decade";
    } else {
        rep.verdict = Verdict::Indeterminate;
        rep.note =
            "neither threshold is cleared on the terminal decade; a survival criterion that is "
            "not met is not evidence of extinction";
    }
    return rep;
}

std::vector<PhaseCell> phase_diagram(const PhaseDiagramSpec& spec, unsigned threads) {
    if (spec.alphas.empty() || spec.betas.empty() || spec.windows.empty())
        throw std::invalid_argument("phase_diagram: grids must be nonempty");
    validate(spec.occupancy);
    const std::int64_t largest = *std::max_element(spec.windows.begin(), spec.windows.end());
    std::vector<PhaseCell> rows;
    for (const double a : spec.alphas) {
        for (const double b : spec.betas) {
            const TheoremTag tag = classify_cell(a, b, spec.occupancy);
            for (const std::int64_t n : spec.windows) {
                FrogConfig config;
                config.window = n;
                config.engine = spec.engine;
                config.occupancy = spec.occupancy;
                config.pi_law = BetaLaw{a, b};
                config.reach_cap = 2 * largest;
                config.seed.master_seed = spec.master_seed;
                PhaseCell cell;
                cell.alpha = a;
                cell.beta = b;
                cell.window = n;
                cell.replications = spec.replications;
                cell.engine = spec.engine;
                cell.tag = tag;
                cell.estimate = estimate_survival(config, spec.replications, threads);
                rows.push_back(cell);
            }
        }
    }
    return rows;
}

}  // namespace frogz
