#include "frogz/laws.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

namespace frogz {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

void validate(const PiLaw& law) {
    std::visit(overloaded{
                   [](const PointMass& m) {
                       if (!(m.p > 0.0 && m.p <= 1.0))
                           throw std::domain_error("point-mass survival parameter must lie in (0,1]");
                   },
                   [](const BetaLaw& b) {
                       if (!(b.alpha > 0.0 && b.beta > 0.0) || !std::isfinite(b.alpha) ||
                           !std::isfinite(b.beta))
                           throw std::domain_error("Beta law requires alpha > 0 and beta > 0");
                   },
               },
               law);
}

std::string describe(const PiLaw& law) {
    return std::visit(overloaded{
                          [](const PointMass& m) { return "point:" + fmt(m.p); },
                          [](const BetaLaw& b) { return "beta:" + fmt(b.alpha) + "," + fmt(b.beta); },
                      },
                      law);
}

void validate(const OccupancyLaw& law) {
    std::visit(overloaded{
                   [](const ConstantOccupancy& c) {
                       if (c.k < 0) throw std::domain_error("constant occupancy must be non-negative");
                   },
                   [](const BernoulliOccupancy& b) {
                       if (!(b.q >= 0.0 && b.q <= 1.0))
                           throw std::domain_error("Bernoulli occupancy requires q in [0,1]");
                   },
                   [](const PoissonOccupancy& p) {
                       if (!(p.lambda > 0.0) || !std::isfinite(p.lambda))
                           throw std::domain_error("Poisson occupancy requires lambda > 0");
                   },
                   [](const GeometricOccupancy& g) {
                       if (!(g.s >= 0.0 && g.s <= 1.0))
                           throw std::domain_error("geometric occupancy requires s in [0,1]");
                   },
               },
               law);
}

std::string describe(const OccupancyLaw& law) {
    return std::visit(overloaded{
                          [](const ConstantOccupancy& c) { return "const:" + std::to_string(c.k); },
                          [](const BernoulliOccupancy& b) { return "bernoulli:" + fmt(b.q); },
                          [](const PoissonOccupancy& p) { return "poisson:" + fmt(p.lambda); },
                          [](const GeometricOccupancy& g) { return "geometric:" + fmt(g.s); },
                      },
                      law);
}

double beta_function(double alpha, double beta) {
    if (!(alpha > 0.0 && beta > 0.0))
        throw std::domain_error("beta_function: arguments must be positive");
    return boost::math::beta(alpha, beta);
}

double log_beta_function(double alpha, double beta) {
    const double b = beta_function(alpha, beta);
    if (b > 0.0 && std::isfinite(b)) return std::log(b);
    return std::lgamma(alpha) + std::lgamma(beta) - std::lgamma(alpha + beta);
}

double beta_pdf(double x, double alpha, double beta) {
    if (!(x > 0.0 && x < 1.0)) throw std::domain_error("beta_pdf: x must lie in (0,1)");
    return std::exp((alpha - 1.0) * std::log(x) + (beta - 1.0) * std::log1p(-x) -
                    log_beta_function(alpha, beta));
}

double sample_log_gamma(double shape, Stream& stream) {
    if (shape < 1.0) {
        // Gamma(a) = Gamma(a + 1) * U^(1/a)
        const double boost = std::log(stream.uniform()) / shape;
        return sample_log_gamma(shape + 1.0, stream) + boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    std::normal_distribution<double> normal;
    for (;;) {
        double x;
        double v;
        do {
            x = normal(stream);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = stream.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d * v);
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return std::log(d * v);
    }
}

SurvivalParameter draw_survival(const PiLaw& law, Stream& stream) {
    return std::visit(
        overloaded{
            [](const PointMass& m) { return SurvivalParameter::from_p(m.p); },
            [&stream](const BetaLaw& b) {
                // X / (X + Y) with X ~ Gamma(alpha), Y ~ Gamma(beta), via the log ratio
                const double log_x = sample_log_gamma(b.alpha, stream);
                const double log_y = sample_log_gamma(b.beta, stream);
                const double d = log_y - log_x;
                SurvivalParameter s{1.0 / (1.0 + std::exp(d)), 1.0 / (1.0 + std::exp(-d))};
                if (s.p >= 1.0) s.p = std::nextafter(1.0, 0.0);
                if (s.p <= 0.0) s.p = std::numeric_limits<double>::denorm_min();
                if (s.q <= 0.0) s.q = std::numeric_limits<double>::denorm_min();
                if (s.q >= 1.0) s.q = std::nextafter(1.0, 0.0);
                return s;
            },
        },
        law);
}

SurvivalParameter draw_survival(const PiLaw& law, const SeedSpec& seed) {
    Stream stream(seed);
    return draw_survival(law, stream);
}

double sample_pi(const PiLaw& law, const SeedSpec& seed) { return draw_survival(law, seed).p; }

double pgf_occupancy(const OccupancyLaw& law, double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("pgf_occupancy: s must lie in [0,1]");
    return std::visit(overloaded{
                          [s](const ConstantOccupancy& c) {
                              return c.k == 0 ? 1.0 : std::pow(s, static_cast<double>(c.k));
                          },
                          [s](const BernoulliOccupancy& b) { return 1.0 - b.q + b.q * s; },
                          [s](const PoissonOccupancy& p) { return std::exp(p.lambda * (s - 1.0)); },
                          [s](const GeometricOccupancy& g) {
                              if (g.s >= 1.0) return s >= 1.0 ? 1.0 : 0.0;
                              return (1.0 - g.s) / (1.0 - g.s * s);
                          },
                      },
                      law);
}

double mean_occupancy(const OccupancyLaw& law) {
    return std::visit(overloaded{
                          [](const ConstantOccupancy& c) { return static_cast<double>(c.k); },
                          [](const BernoulliOccupancy& b) { return b.q; },
                          [](const PoissonOccupancy& p) { return p.lambda; },
                          [](const GeometricOccupancy& g) {
                              return g.s >= 1.0 ? kInfiniteMean : g.s / (1.0 - g.s);
                          },
                      },
                      law);
}

double prob_zero_occupancy(const OccupancyLaw& law) { return pgf_occupancy(law, 0.0); }

std::int64_t sample_occupancy(const OccupancyLaw& law, Stream& stream) {
    return std::visit(
        overloaded{
            [](const ConstantOccupancy& c) { return c.k; },
            [&stream](const BernoulliOccupancy& b) -> std::int64_t {
                return stream.uniform() < b.q ? 1 : 0;
            },
            [&stream](const PoissonOccupancy& p) -> std::int64_t {
                std::poisson_distribution<std::int64_t> dist(p.lambda);
                return dist(stream);
            },
            [&stream](const GeometricOccupancy& g) -> std::int64_t {
                if (g.s >= 1.0)
                    throw std::domain_error("geometric occupancy with s = 1 has infinite mass at infinity");
                if (g.s <= 0.0) return 0;
                return static_cast<std::int64_t>(std::floor(std::log(stream.uniform()) / std::log(g.s)));
            },
        },
        law);
}

std::int64_t sample_occupancy(const OccupancyLaw& law, const SeedSpec& seed) {
    Stream stream(seed);
    return sample_occupancy(law, stream);
}

}  // namespace frogz
