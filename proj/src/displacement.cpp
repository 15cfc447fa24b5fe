#include "frogz/displacement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "frogz/error.hpp"

namespace frogz {

std::string_view to_string(EngineKind e) {
    switch (e) {
        case EngineKind::ExactWalk: return "exact";
        case EngineKind::MarginalInterval: return "marginal";
        case EngineKind::RightOnly: return "right-only";
        case EngineKind::StarUpper: return "star-upper";
    }
    return "?";
}

EngineKind parse_engine(std::string_view name) {
    if (name == "exact") return EngineKind::ExactWalk;
    if (name == "marginal") return EngineKind::MarginalInterval;
    if (name == "right-only") return EngineKind::RightOnly;
    if (name == "star-upper") return EngineKind::StarUpper;
    throw std::invalid_argument("unknown engine '" + std::string(name) +
                                "' (expected exact|marginal|right-only|star-upper)");
}

namespace {

void check_probability(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("survival parameter must lie in (0,1]");
}

std::int64_t floor_to_reach(double v) {
    if (!(v < 9.0e18)) return kUnboundedReach;
    return static_cast<std::int64_t>(std::floor(v));
}

}  // namespace

double tail_ratio(SurvivalParameter s) {
    if (s.q <= 0.0) return 1.0;
    // (1 - sqrt(1 - p^2)) / p == p / (1 + sqrt(1 - p^2)), and 1 - p^2 = q (1 + p)
    return s.p / (1.0 + std::sqrt(s.q * (1.0 + s.p)));
}

double tail_ratio(double p) {
    check_probability(p);
    return tail_ratio(SurvivalParameter::from_p(p));
}

double decay_rate(SurvivalParameter s) {
    if (s.q <= 0.0) return 0.0;
    // acosh(1 + z) with z = 1/p - 1 = q/p
    const double z = s.q / s.p;
    return std::log1p(z + std::sqrt(z * (z + 2.0)));
}

double d_star_tail(SurvivalParameter s, std::int64_t n) {
    if (n <= 0) return 1.0;
    const double theta = decay_rate(s);
    if (theta == 0.0) return 1.0;
    const double e = std::exp(-static_cast<double>(n) * theta);
    return 2.0 * e / (1.0 + e * e);
}

std::int64_t sample_d_right(SurvivalParameter s, Stream& stream) {
    const double theta = decay_rate(s);
    const double u = stream.uniform();
    if (theta == 0.0) return kUnboundedReach;
    return floor_to_reach(-std::log(u) / theta);
}

std::int64_t sample_d_right(double p, const SeedSpec& seed) {
    check_probability(p);
    Stream stream(seed);
    return sample_d_right(SurvivalParameter::from_p(p), stream);
}

std::int64_t star_upper_quantile(SurvivalParameter s, double u) {
    const double theta = decay_rate(s);
    if (theta == 0.0) return kUnboundedReach;
    return floor_to_reach(std::log(2.0 / u) / theta);
}

std::int64_t sample_d_star_upper(double p, const SeedSpec& seed) {
    check_probability(p);
    Stream stream(seed);
    return star_upper_quantile(SurvivalParameter::from_p(p), stream.uniform());
}

ParticleReach simulate_walk_reach(SurvivalParameter s, std::uint64_t step_budget,
                                  std::int64_t window, Stream& stream) {
    return detail::walk_reach(s, step_budget, window, stream, [](std::int64_t) {});
}

ParticleReach simulate_walk_reach(double p, std::uint64_t step_budget, std::int64_t window,
                                  const SeedSpec& seed) {
    check_probability(p);
    if (step_budget < 1 || window < 1)
        throw std::invalid_argument("simulate_walk_reach: step_budget and window must be >= 1");
    Stream stream(seed);
    return simulate_walk_reach(SurvivalParameter::from_p(p), step_budget, window, stream);
}

ParticleReach sample_walk_reach(SurvivalParameter s, std::int64_t cap, Stream& stream) {
    ParticleReach out;
    if (cap <= 0) {
        out.truncated_left = out.truncated_right = true;
        return out;
    }
    const double theta = decay_rate(s);
    const double r = std::exp(-theta);

    // The walk always sits at one end of its range [-d_left, d_right] of width
    // w. Exiting (-d_left - 1, d_right + 1) alive through the near end has
    // probability sinh((w+1)t)/sinh((w+2)t), through the far end
    // sinh(t)/sinh((w+2)t). With S(k) = 1 - exp(-2kt) these become
    //   near = e^-t S(w+1)/S(w+2),  far = e^-(w+1)t S(1)/S(w+2).
    bool at_right = true;
    std::int64_t& hi = out.d_right;
    std::int64_t& lo = out.d_left;
    const double s1 = -std::expm1(-2.0 * theta);
    double s_next = s1;                        // S(w+1)
    double far_decay = r;                      // e^-(w+1)t
    while (hi < cap && lo < cap) {
        const double w = static_cast<double>(hi + lo);
        double near, far;
        if (theta == 0.0) {
            near = (w + 1.0) / (w + 2.0);
            far = 1.0 / (w + 2.0);
        } else {
            const double s_after = -std::expm1(-2.0 * (w + 2.0) * theta);
            near = r * s_next / s_after;
            far = far_decay * s1 / s_after;
            s_next = s_after;
            far_decay *= r;
        }
        const double u = stream.uniform();
        if (u < near) {
            (at_right ? hi : lo) += 1;
        } else if (u < near + far) {
            at_right = !at_right;
            (at_right ? hi : lo) += 1;
        } else {
            break;
        }
        ++out.steps_used;
    }
    // One side hit the cap and the walk stands at that end; the other side
    // only needs the one-sided hitting law: P(K >= k) = r^(w + k).
    if (hi >= cap && lo < cap) {
        const double extra = theta == 0.0 ? 1e300 : -std::log(stream.uniform()) / theta -
                                                        static_cast<double>(hi + lo);
        if (extra >= 1.0) lo += std::min<std::int64_t>(floor_to_reach(extra), cap - lo);
    } else if (lo >= cap && hi < cap) {
        const double extra = theta == 0.0 ? 1e300 : -std::log(stream.uniform()) / theta -
                                                        static_cast<double>(hi + lo);
        if (extra >= 1.0) hi += std::min<std::int64_t>(floor_to_reach(extra), cap - hi);
    }
    hi = std::min(hi, cap);
    lo = std::min(lo, cap);
    out.truncated_right = hi >= cap;
    out.truncated_left = lo >= cap;
    out.d_star = std::max(hi, lo);
    return out;
}

std::int64_t couple_star_upper(SurvivalParameter s, const ParticleReach& reach, std::int64_t cap,
                               Stream& stream) {
    const double v = stream.uniform();
    if (s.immortal()) return cap;
    const std::int64_t d = reach.d_star;
    const double tail_d = d_star_tail(s, d);
    double u;
    if (reach.truncated_left || reach.truncated_right) {
        u = v * tail_d;  // only D* >= d is known
    } else {
        const double tail_next = d_star_tail(s, d + 1);
        u = tail_next + v * (tail_d - tail_next);
    }
    std::int64_t y = star_upper_quantile(s, u);
    y = std::max(y, d);
    return std::min(y, cap);
}

namespace {

struct PieceResult {
    double value = 0.0;
    double error = 0.0;
};

template <class F>
PieceResult integrate_piece(F f, double a, double b) {
    thread_local boost::math::quadrature::tanh_sinh<double> rule;
    PieceResult out;
    if (!(b > a)) return out;
    double err = 0.0;
    // mapped onto [0, 1]: on very narrow intervals the rule's error estimate
    // otherwise carries an absolute floor unrelated to the integrand
    const double width = b - a;
    out.value = rule.integrate([&](double s) { return f(a + width * s) * width; }, 0.0, 1.0, 1e-12, &err);
    out.error = err;
    return out;
}

}  // namespace

double tail_d_right_beta(std::int64_t n, double alpha, double beta) {
    if (!(alpha > 0.0 && beta > 0.0))
        throw std::domain_error("tail_d_right_beta: alpha and beta must be positive");
    if (n <= 0) return 1.0;
    const double nd = static_cast<double>(n);
    const double log_b = log_beta_function(alpha, beta);

    // log r(x) for x = 1 - eps, accurate for small eps.
    auto log_r_eps = [](double eps) {
        return std::log1p(-eps) - std::log1p(std::sqrt(eps * (2.0 - eps)));
    };

    // Split at x = 1 - 1/(n+1). Left piece: u = x^alpha removes x^(alpha-1).
    const double eps_split = 1.0 / (nd + 1.0);
    const double x_split = 1.0 - eps_split;
    auto left = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double x = std::pow(u, 1.0 / alpha);
        if (x >= 1.0) return 0.0;
        const double eps = 1.0 - x;
        const double log_r = std::log(x) - std::log1p(std::sqrt((1.0 - x) * (1.0 + x)));
        return std::exp(nd * log_r + (beta - 1.0) * std::log(eps) - log_b) / alpha;
    };
    // Right piece: t = eps^beta removes (1-x)^(beta-1). The mass sits at
    // eps ~ 1/n^2, so the eps range is cut into geometric shells around it.
    auto right = [&](double t) {
        if (t <= 0.0) return 0.0;
        const double eps = std::pow(t, 1.0 / beta);
        if (eps >= 1.0) return 0.0;
        return std::exp(nd * log_r_eps(eps) + (alpha - 1.0) * std::log1p(-eps) - log_b) / beta;
    };

    double total = 0.0;
    double error = 0.0;
    {
        const auto piece = integrate_piece(left, 0.0, std::pow(x_split, alpha));
        total += piece.value;
        error += piece.error;
    }
    std::vector<double> shells{eps_split};
    const double floor_eps = 1e-4 / (nd * nd);
    while (shells.back() > floor_eps) shells.push_back(shells.back() / 4.0);
    shells.push_back(0.0);
    for (std::size_t i = 0; i + 1 < shells.size(); ++i) {
        const auto piece =
            integrate_piece(right, std::pow(shells[i + 1], beta), std::pow(shells[i], beta));
        total += piece.value;
        error += piece.error;
    }
    if (!std::isfinite(total) || error > 1e-4 * std::max(total, 1e-300) + 1e-300) {
        std::ostringstream os;
        os << "tail_d_right_beta: quadrature did not converge (n=" << n << ", alpha=" << alpha
           << ", beta=" << beta << ", value=" << total << ", error estimate=" << error << ")";
        throw NumericError(os.str());
    }
    return std::min(total, 1.0);
}

}  // namespace frogz
