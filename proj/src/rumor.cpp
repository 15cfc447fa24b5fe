#include "frogz/rumor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "frogz/parallel.hpp"

namespace frogz {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::int64_t kRadiusSearchLimit = std::int64_t{1} << 62;

std::int64_t floor_radius(double v) {
    if (!(v < 4.0e18)) return kRadiusSearchLimit;
    return static_cast<std::int64_t>(std::floor(v));
}

// Largest n with tail(n) >= u, for a nonincreasing tail with tail(0) = 1.
std::int64_t invert_tail(const std::function<double(std::int64_t)>& tail, double u) {
    std::int64_t good = 0, bad = 1;
    while (tail(bad) >= u) {
        good = bad;
        if (bad >= kRadiusSearchLimit / 2) return kRadiusSearchLimit;
        bad *= 2;
    }
    while (bad - good > 1) {
        const std::int64_t mid = good + (bad - good) / 2;
        if (tail(mid) >= u)
            good = mid;
        else
            bad = mid;
    }
    return good;
}

}  // namespace

EmpiricalSampler make_empirical_sampler(std::function<std::int64_t(Stream&)> draw,
                                        std::uint64_t reference_samples, const SeedSpec& seed) {
    if (reference_samples == 0) throw std::invalid_argument("empirical sampler needs samples");
    Stream stream(seed.with_purpose(Purpose::Radius));
    std::vector<std::uint64_t> counts;
    for (std::uint64_t k = 0; k < reference_samples; ++k) {
        const std::int64_t v = draw(stream);
        if (v < 0) throw std::domain_error("empirical radius sampler returned a negative value");
        const auto idx = static_cast<std::size_t>(std::min<std::int64_t>(v, 1 << 20));
        if (counts.size() <= idx) counts.resize(idx + 1, 0);
        ++counts[idx];
    }
    auto table = std::make_shared<std::vector<double>>(counts.size() + 1, 0.0);
    double above = 0.0;
    for (std::size_t n = counts.size(); n-- > 0;) {
        above += static_cast<double>(counts[n]);
        (*table)[n] = above / static_cast<double>(reference_samples);
    }
    (*table)[0] = 1.0;
    return EmpiricalSampler{std::move(draw), std::move(table)};
}

void validate(const RadiusModel& model) {
    std::visit(overloaded{
                   [](const AnalyticTail& a) {
                       if (!a.tail) throw std::domain_error("analytic radius needs a tail function");
                   },
                   [](const GeometricTail& g) {
                       if (!(g.r >= 0.0 && g.r < 1.0))
                           throw std::domain_error("geometric radius tail requires r in [0,1)");
                   },
                   [](const BernoulliRadius& b) {
                       if (!(b.q >= 0.0 && b.q <= 1.0))
                           throw std::domain_error("Bernoulli radius requires q in [0,1]");
                   },
                   [](const PowerLawTail& p) {
                       if (!(p.c > 0.0) || !std::isfinite(p.c))
                           throw std::domain_error("power-law radius requires c > 0");
                   },
                   [](const EmpiricalSampler& e) {
                       if (!e.draw || !e.tail_table)
                           throw std::domain_error("empirical radius needs a sampler and tail table");
                   },
               },
               model);
}

std::string describe(const RadiusModel& model) {
    auto num = [](double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    };
    return std::visit(overloaded{
                          [](const AnalyticTail&) { return std::string("analytic"); },
                          [&](const GeometricTail& g) { return "geometric:" + num(g.r); },
                          [&](const BernoulliRadius& b) { return "bernoulli:" + num(b.q); },
                          [&](const PowerLawTail& p) { return "powerlaw:" + num(p.c); },
                          [](const EmpiricalSampler&) { return std::string("empirical"); },
                      },
                      model);
}

double radius_tail(const RadiusModel& model, std::int64_t n) {
    if (n <= 0) return 1.0;
    return std::visit(overloaded{
                          [n](const AnalyticTail& a) { return std::clamp(a.tail(n), 0.0, 1.0); },
                          [n](const GeometricTail& g) {
                              return std::pow(g.r, static_cast<double>(n));
                          },
                          [n](const BernoulliRadius& b) { return n == 1 ? b.q : 0.0; },
                          [n](const PowerLawTail& p) {
                              return p.c / (static_cast<double>(n) + p.c);
                          },
                          [n](const EmpiricalSampler& e) {
                              const auto& t = *e.tail_table;
                              return static_cast<std::size_t>(n) < t.size()
                                         ? t[static_cast<std::size_t>(n)]
                                         : 0.0;
                          },
                      },
                      model);
}

std::int64_t sample_radius(const RadiusModel& model, Stream& stream) {
    return std::visit(overloaded{
                          [&stream](const AnalyticTail& a) {
                              const double u = stream.uniform();
                              return invert_tail([&a](std::int64_t n) { return n <= 0 ? 1.0 : a.tail(n); }, u);
                          },
                          [&stream](const GeometricTail& g) -> std::int64_t {
                              const double u = stream.uniform();
                              if (g.r <= 0.0) return 0;
                              return floor_radius(std::log(u) / std::log(g.r));
                          },
                          [&stream](const BernoulliRadius& b) -> std::int64_t {
                              return stream.uniform() < b.q ? 1 : 0;
                          },
                          [&stream](const PowerLawTail& p) {
                              const double u = stream.uniform();
                              return floor_radius(p.c * (1.0 / u - 1.0));
                          },
                          [&stream](const EmpiricalSampler& e) { return e.draw(stream); },
                      },
                      model);
}

double radius_cdf_from_occupancy(const OccupancyLaw& occupancy, const RadiusModel& radius,
                                 std::int64_t i) {
    if (i < 0) throw std::domain_error("radius_cdf_from_occupancy: i must be >= 0");
    const double single = std::clamp(1.0 - radius_tail(radius, i + 1), 0.0, 1.0);
    return pgf_occupancy(occupancy, single);
}

std::vector<double> radius_pmf(const OccupancyLaw& occupancy, const RadiusModel& radius,
                               std::int64_t r_max) {
    if (r_max < 0 || r_max > 64) throw std::length_error("radius_pmf: r_max must lie in [0, 64]");
    std::vector<double> pmf(static_cast<std::size_t>(r_max + 1), 0.0);
    double below = 0.0;
    for (std::int64_t k = 0; k < r_max; ++k) {
        const double cdf = radius_cdf_from_occupancy(occupancy, radius, k);
        pmf[static_cast<std::size_t>(k)] = std::max(0.0, cdf - below);
        below = std::max(below, cdf);
    }
    pmf[static_cast<std::size_t>(r_max)] = std::max(0.0, 1.0 - below);
    return pmf;
}

RadiusField::RadiusField(OccupancyLaw occupancy, RadiusModel radius, SeedSpec seed)
    : occupancy_(std::move(occupancy)), radius_(std::move(radius)), seed_(seed) {
    validate(occupancy_);
    validate(radius_);
}

std::int64_t RadiusField::operator()(std::int64_t z) const {
    Stream spreaders(seed_.at(z, 0, Purpose::Spreaders));
    const std::int64_t count = sample_occupancy(occupancy_, spreaders);
    std::int64_t best = 0;
    for (std::int64_t i = 0; i < count; ++i) {
        Stream s(seed_.at(z, static_cast<std::uint64_t>(i), Purpose::Radius));
        best = std::max(best, sample_radius(radius_, s));
    }
    return best;
}

RadiusFn RadiusField::fn() const {
    return [self = *this](std::int64_t z) { return self(z); };
}

// ---------------------------------------------------------------------------

FireworkResult run_firework(const RadiusFn& radius, std::int64_t window) {
    if (window < 1) throw std::invalid_argument("run_firework: window must be >= 1");
    FireworkResult out;
    std::int64_t front = 0;
    std::int64_t done = -1;
    std::int64_t step = 0;
    while (front < window) {
        const std::int64_t gen_hi = front;
        if (gen_hi == done) {
            out.extinction_step = step;
            break;
        }
        for (std::int64_t u = done + 1; u <= gen_hi; ++u) {
            const std::int64_t reach = radius(u);
            front = std::max(front, reach >= window - u ? window : u + reach);
            if (front >= window) break;
        }
        done = gen_hi;
        ++step;
        if (!out.front_trace.empty() && front < out.front_trace.back())
            throw std::logic_error("firework front moved backwards");
        out.front_trace.push_back(front);
    }
    out.front = std::min(front, window);
    out.reached = out.front >= window;
    return out;
}

FireworkResult run_firework(const OccupancyLaw& occupancy, const RadiusModel& radius,
                            std::int64_t window, const SeedSpec& seed) {
    return run_firework(RadiusField(occupancy, radius, seed).fn(), window);
}

BfwResult run_bfw(const RadiusFn& radius, std::int64_t window) {
    if (window < 1) throw std::invalid_argument("run_bfw: window must be >= 1");
    BfwResult out;
    std::int64_t lo = 0, hi = 0;
    std::int64_t done_lo = 1, done_hi = -1;  // nothing has spread yet
    std::int64_t step = 0;
    auto spread = [&](std::int64_t u) {
        const std::int64_t reach = radius(u);
        lo = std::min(lo, reach >= window + u ? -window : u - reach);
        hi = std::max(hi, reach >= window - u ? window : u + reach);
    };
    for (;;) {
        const std::int64_t gen_lo = lo, gen_hi = hi;
        if (gen_lo == done_lo && gen_hi == done_hi) {
            out.extinction_step = step;
            break;
        }
        if (done_hi < done_lo) {
            spread(0);
        } else {
            for (std::int64_t u = done_hi + 1; u <= gen_hi; ++u) spread(u);
            for (std::int64_t u = done_lo - 1; u >= gen_lo; --u) spread(u);
        }
        done_lo = gen_lo;
        done_hi = gen_hi;
        ++step;
        if (!out.trace.empty() && (lo > out.trace.back().first || hi < out.trace.back().second))
            throw std::logic_error("informed interval shrank");
        out.trace.emplace_back(lo, hi);
        if (lo <= -window && hi >= window) break;
    }
    out.left = lo;
    out.right = hi;
    out.reached_left = lo <= -window;
    out.reached_right = hi >= window;
    return out;
}

BfwResult run_bfw(const OccupancyLaw& occupancy, const RadiusModel& radius, std::int64_t window,
                  const SeedSpec& seed) {
    return run_bfw(RadiusField(occupancy, radius, seed).fn(), window);
}

BfwResult run_bfw_star(const RadiusFn& radius, std::int64_t window) {
    return run_bfw([&radius](std::int64_t z) { return radius(z < 0 ? -z : z); }, window);
}

BfwResult run_bfw_star(const OccupancyLaw& occupancy, const RadiusModel& radius,
                       std::int64_t window, const SeedSpec& seed) {
    return run_bfw_star(RadiusField(occupancy, radius, seed).fn(), window);
}

std::string_view to_string(RumorProcess p) {
    switch (p) {
        case RumorProcess::Firework: return "fw";
        case RumorProcess::Bidirectional: return "bfw";
        case RumorProcess::Mirrored: return "bfw-star";
    }
    return "?";
}

RumorProcess parse_rumor_process(std::string_view name) {
    if (name == "fw") return RumorProcess::Firework;
    if (name == "bfw") return RumorProcess::Bidirectional;
    if (name == "bfw-star") return RumorProcess::Mirrored;
    throw std::invalid_argument("unknown rumor process '" + std::string(name) +
                                "' (expected fw|bfw|bfw-star)");
}

ProportionEstimate make_proportion(std::uint64_t hits, std::uint64_t trials) {
    ProportionEstimate e;
    e.hits = hits;
    e.trials = trials;
    e.estimate = trials == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(trials);
    const Interval ci = wilson_interval(hits, trials);
    e.ci_lo = ci.lo;
    e.ci_hi = ci.hi;
    return e;
}

ProportionEstimate estimate_rumor_reach(RumorProcess process, const OccupancyLaw& occupancy,
                                        const RadiusModel& radius, std::int64_t window,
                                        std::uint64_t reps, const SeedSpec& seed,
                                        unsigned threads) {
    validate(occupancy);
    validate(radius);
    std::vector<char> hit(reps, 0);
    parallel_for(reps, threads, [&](std::uint64_t r) {
        SeedSpec s = seed;
        s.replication = r;
        const RadiusField field(occupancy, radius, s);
        switch (process) {
            case RumorProcess::Firework: hit[r] = run_firework(field.fn(), window).reached; break;
            case RumorProcess::Bidirectional: hit[r] = run_bfw(field.fn(), window).reached_any(); break;
            case RumorProcess::Mirrored: hit[r] = run_bfw_star(field.fn(), window).reached_any(); break;
        }
    });
    std::uint64_t hits = 0;
    for (char h : hit) hits += h ? 1 : 0;
    return make_proportion(hits, reps);
}

double fw_reach_probability_dp(std::span<const double> pmf, std::int64_t window) {
    if (pmf.empty() || pmf.size() > 65)
        throw std::length_error("fw_reach_probability_dp: pmf support must be {0..r_max} with r_max <= 64");
    if (window < 1 || window > 10000)
        throw std::length_error("fw_reach_probability_dp: window must lie in [1, 10^4]");
    double total = 0.0;
    for (double v : pmf) {
        if (!(v >= 0.0)) throw std::domain_error("fw_reach_probability_dp: negative pmf entry");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::domain_error("fw_reach_probability_dp: pmf must sum to 1");

    const std::size_t k_max = pmf.size() - 1;
    std::vector<double> cdf(pmf.size());
    double acc = 0.0;
    for (std::size_t k = 0; k <= k_max; ++k) cdf[k] = (acc += pmf[k]);

    // dist[o]: probability that after spreading from vertex u the front sits at u + o
    std::vector<double> dist(pmf.begin(), pmf.end());
    std::vector<double> next(pmf.size());
    double reached = 0.0;
    for (std::int64_t u = 0; u < window; ++u) {
        bool alive = false;
        for (std::size_t o = 0; o <= k_max; ++o) {
            if (u + static_cast<std::int64_t>(o) >= window) {
                reached += dist[o];
                dist[o] = 0.0;
            }
        }
        dist[0] = 0.0;  // front did not pass u: dead
        for (std::size_t o = 1; o <= k_max; ++o) alive = alive || dist[o] > 0.0;
        if (!alive) break;
        // spread from u + 1: o' = max(o - 1, I)
        double below = 0.0;  // P(o - 1 < k)
        for (std::size_t k = 0; k <= k_max; ++k) {
            const double at = k + 1 <= k_max ? dist[k + 1] : 0.0;  // P(o - 1 == k)
            next[k] = at * cdf[k] + below * pmf[k];
            below += at;
        }
        dist.swap(next);
    }
    return std::min(reached, 1.0);
}

RumorCouplingAudit audit_rumor_coupling(const OccupancyLaw& occupancy, const RadiusModel& radius,
                                        std::int64_t window, std::uint64_t reps,
                                        const SeedSpec& seed, unsigned threads) {
    struct Outcome {
        bool fw = false, bfw = false, fw_star = false, nested = true;
    };
    std::vector<Outcome> outcomes(reps);
    parallel_for(reps, threads, [&](std::uint64_t r) {
        SeedSpec s = seed;
        s.replication = r;
        const RadiusField field(occupancy, radius, s);
        const auto fw = run_firework(field.fn(), window);
        const auto bfw = run_bfw(field.fn(), window);
        const auto fw_star =
            run_firework([&field](std::int64_t x) { return std::max(field(-x), field(x)); }, window);
        Outcome& o = outcomes[r];
        o.fw = fw.reached;
        o.bfw = bfw.reached_any();
        o.fw_star = fw_star.reached;
        o.nested = fw.front <= bfw.right && std::max(-bfw.left, bfw.right) <= fw_star.front;
    });
    RumorCouplingAudit audit;
    audit.runs = reps;
    for (const auto& o : outcomes) {
        audit.fw_reached += o.fw;
        audit.bfw_reached += o.bfw;
        audit.fw_star_reached += o.fw_star;
        if (o.fw && !o.bfw) ++audit.fw_not_in_bfw;
        if (o.bfw && !o.fw_star) ++audit.bfw_not_in_fw_star;
        if (!o.nested) ++audit.set_violations;
    }
    return audit;
}

// ---------------------------------------------------------------------------

std::string_view to_string(SeriesClass c) {
    switch (c) {
        case SeriesClass::Converging: return "converging";
        case SeriesClass::Diverging: return "diverging";
        case SeriesClass::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

struct Fit {
    double slope = 0.0;
    bool ok = false;
};

Fit least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    Fit f;
    const std::size_t n = xs.size();
    if (n < 3) return f;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0) return f;
    f.slope = sxy / sxx;
    f.ok = std::isfinite(f.slope);
    return f;
}

// Products decaying like n^s are summable iff s < -1.
SeriesClass classify_exponent(double s, bool stable) {
    constexpr double kBand = 0.05;
    if (!stable) return SeriesClass::Inconclusive;
    if (s < -1.0 - kBand) return SeriesClass::Converging;
    if (s > -1.0 + kBand) return SeriesClass::Diverging;
    return SeriesClass::Inconclusive;
}

}  // namespace

SeriesDiagnostic series_criterion(const OccupancyLaw& occupancy, const RadiusModel& radius,
                                  std::int64_t n_max) {
    if (n_max < 100) throw std::invalid_argument("series_criterion: n_max must be >= 100");
    validate(occupancy);
    validate(radius);
    SeriesDiagnostic d;
    d.n_max = n_max;
    const double mean = mean_occupancy(occupancy);
    d.inverse_mean = is_infinite_mean(mean) ? 0.0 : (mean > 0.0 ? 1.0 / mean : kInfiniteMean);

    // log of prod_{i=0}^{m} P(I <= i) for m = 0..n_max
    std::vector<double> log_prod(static_cast<std::size_t>(n_max + 1));
    double lp = 0.0;
    bool vanished = false;
    for (std::int64_t i = 0; i <= n_max; ++i) {
        const double c = radius_cdf_from_occupancy(occupancy, radius, i);
        if (c <= 0.0) vanished = true;
        lp = vanished ? -std::numeric_limits<double>::infinity() : lp + std::log(c);
        log_prod[static_cast<std::size_t>(i)] = lp;
    }
    d.partial_sums.reserve(static_cast<std::size_t>(n_max));
    d.squared_partial_sums.reserve(static_cast<std::size_t>(n_max));
    double s1 = 0.0, s2 = 0.0;
    for (std::int64_t m = 1; m <= n_max; ++m) {
        const double l = log_prod[static_cast<std::size_t>(m)];
        s1 += std::exp(l);
        s2 += std::exp(2.0 * l);
        d.partial_sums.push_back(s1);
        d.squared_partial_sums.push_back(s2);
    }

    const std::int64_t start = std::max<std::int64_t>(1, n_max / 10);
    d.tail_liminf_proxy = std::numeric_limits<double>::infinity();
    d.tail_limsup_proxy = 0.0;
    for (std::int64_t n = start; n <= n_max; ++n) {
        const double v = static_cast<double>(n) * radius_tail(radius, n);
        d.tail_liminf_proxy = std::min(d.tail_liminf_proxy, v);
        d.tail_limsup_proxy = std::max(d.tail_limsup_proxy, v);
    }

    if (vanished) {
        // products are eventually zero: both series are finite
        d.decay_exponent = -std::numeric_limits<double>::infinity();
        d.classification = SeriesClass::Converging;
        d.squared_classification = SeriesClass::Converging;
        return d;
    }

    // Least-squares slope of log-product against log n over the last decade,
    // also on each half of it; a fit whose halves disagree is unstable.
    auto fit_range = [&](std::int64_t a, std::int64_t b) {
        std::vector<double> xs, ys;
        const double la = std::log(static_cast<double>(a)), lb = std::log(static_cast<double>(b));
        constexpr int kPoints = 64;
        std::int64_t last = -1;
        for (int k = 0; k <= kPoints; ++k) {
            const auto n = static_cast<std::int64_t>(std::llround(std::exp(la + (lb - la) * k / kPoints)));
            if (n == last) continue;
            last = n;
            xs.push_back(std::log(static_cast<double>(n)));
            ys.push_back(log_prod[static_cast<std::size_t>(n)]);
        }
        return least_squares_slope(xs, ys);
    };
    const Fit whole = fit_range(start, n_max);
    const auto mid = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(start) * n_max)));
    const Fit first = fit_range(start, mid);
    const Fit second = fit_range(mid, n_max);
    const bool stable = whole.ok && first.ok && second.ok && std::abs(first.slope - second.slope) < 0.25;
    d.decay_exponent = whole.slope;
    d.classification = classify_exponent(whole.slope, stable);
    d.squared_classification = classify_exponent(2.0 * whole.slope, stable);
    return d;
}

}  // namespace frogz
