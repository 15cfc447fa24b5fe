#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "frogz/laws.hpp"
#include "frogz/rng.hpp"
#include "oracles.hpp"

using namespace frogz;

namespace {

std::vector<double> draw_pi(const PiLaw& law, std::uint64_t n, std::uint64_t master = 7) {
    std::vector<double> xs(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        SeedSpec s;
        s.master_seed = master;
        s.particle = i;
        s.purpose = Purpose::SurvivalParameter;
        xs[i] = sample_pi(law, s);
    }
    return xs;
}

double ecdf(const std::vector<double>& sorted, double x) {
    return static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin()) /
           static_cast<double>(sorted.size());
}

}  // namespace

TEST(BetaFunction, KnownValues) {
    EXPECT_NEAR(beta_function(1, 1), 1.0, 1e-15);
    EXPECT_NEAR(beta_function(2, 0.5), 4.0 / 3.0, 1e-14);
    EXPECT_NEAR(beta_function(0.5, 0.5), std::numbers::pi, 1e-13);
    EXPECT_NEAR(beta_function(2, 2), 1.0 / 6.0, 1e-15);
}

TEST(BetaFunction, MatchesDefiningIntegralOnGrid) {
    const double grid[] = {0.25, 0.5, 1, 2, 5};
    for (double a : grid) {
        for (double b : grid) {
            const double ref = oracle::beta_integral(a, b);
            EXPECT_LE(std::abs(beta_function(a, b) / ref - 1.0), 1e-8) << "a=" << a << " b=" << b;
        }
    }
}

TEST(BetaFunction, WideArgumentRangeMatchesLogGamma) {
    for (double a : {1e-3, 0.1, 3.7, 50.0, 1e3}) {
        for (double b : {1e-3, 0.5, 12.0, 1e3}) {
            const double log_ref = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
            EXPECT_NEAR(log_beta_function(a, b), log_ref, 1e-11 * std::max(1.0, std::abs(log_ref))) << a << " " << b;
            const double ref = std::exp(log_ref);
            if (std::isnormal(ref)) EXPECT_LE(std::abs(beta_function(a, b) / ref - 1.0), 1e-10) << a << " " << b;
        }
    }
}

TEST(BetaFunction, RejectsNonPositiveArguments) {
    EXPECT_THROW(beta_function(0, 1), std::domain_error);
    EXPECT_THROW(beta_function(1, -2), std::domain_error);
    EXPECT_THROW(beta_function(std::nan(""), 1), std::domain_error);
}

TEST(BetaPdf, Values) {
    EXPECT_NEAR(beta_pdf(0.5, 1, 1), 1.0, 1e-15);
    EXPECT_NEAR(beta_pdf(0.5, 2, 2), 1.5, 1e-14);
    // (1 - x)^(-1/2) blow-up near 1 for Beta(1, 1/2)
    const double x = 1.0 - 1e-10;
    const double near1 = beta_pdf(x, 1, 0.5);
    EXPECT_NEAR(near1 / (0.5 / std::sqrt(1.0 - x)), 1.0, 1e-12);
    EXPECT_GT(beta_pdf(1.0 - 1e-14, 1, 0.5), near1);
}

TEST(BetaPdf, IntegratesToOne) {
    boost::math::quadrature::tanh_sinh<double> ts;
    for (auto [a, b] : {std::pair{2.0, 2.0}, {1.0, 0.5}, {0.5, 0.5}, {5.0, 0.25}}) {
        // u = x^a on (0, 1/2] and t = (1-x)^b on [1/2, 1) keep both pieces bounded
        auto left = [&](double u) {
            const double x = std::pow(u, 1.0 / a);
            return x > 0.0 ? beta_pdf(x, a, b) * x / (a * u) : 0.0;
        };
        auto right = [&](double t) {
            const double e = std::pow(t, 1.0 / b);
            // 1 - e loses digits for tiny e; there the integrand is (1-e)^(a-1) / (b B(a, b))
            if (e < 1e-6) return std::exp((a - 1.0) * std::log1p(-e)) / (b * beta_function(a, b));
            return beta_pdf(1.0 - e, a, b) * e / (b * t);
        };
        const double total = ts.integrate(left, 0.0, std::pow(0.5, a), 1e-12) +
                             ts.integrate(right, 0.0, std::pow(0.5, b), 1e-12);
        EXPECT_NEAR(total, 1.0, 1e-6) << a << " " << b;
    }
}

TEST(BetaPdf, RejectsOutsideOpenInterval) {
    EXPECT_THROW(beta_pdf(0.0, 1, 1), std::domain_error);
    EXPECT_THROW(beta_pdf(1.0, 1, 1), std::domain_error);
    EXPECT_THROW(beta_pdf(-0.1, 2, 2), std::domain_error);
}

TEST(SamplePi, PointMassIsExactlyConstant) {
    for (double v : draw_pi(PointMass{0.7}, 1000)) EXPECT_EQ(v, 0.7);
    for (double v : draw_pi(PointMass{1.0}, 100)) EXPECT_EQ(v, 1.0);
}

TEST(SamplePi, BetaDrawsMatchCdf) {
    for (auto [a, b] : {std::pair{1.0, 1.0}, {2.0, 2.0}, {1.0, 0.5}, {0.5, 0.5}, {0.3, 2.0}}) {
        const auto xs = draw_pi(BetaLaw{a, b}, 1'000'000, 11);
        for (double x : xs) ASSERT_TRUE(x > 0.0 && x < 1.0);
        const double d = oracle::ks_one_sample(xs, [&](double x) { return boost::math::ibeta(a, b, x); });
        EXPECT_LT(d, 0.002) << "a=" << a << " b=" << b;
    }
}

TEST(SamplePi, BetaTwoTwoMean) {
    const auto xs = draw_pi(BetaLaw{2, 2}, 1'000'000, 3);
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    EXPECT_NEAR(mean, 0.5, 0.001);
}

TEST(SamplePi, SmallShapesStayInsideUnitInterval) {
    for (double x : draw_pi(BetaLaw{0.05, 0.05}, 100000, 5)) ASSERT_TRUE(x > 0.0 && x < 1.0);
    for (double x : draw_pi(BetaLaw{1.0, 0.02}, 100000, 5)) ASSERT_TRUE(x > 0.0 && x < 1.0);
}

TEST(SamplePi, CloseToOneKeepsComplementPrecision) {
    // Beta(1, 0.05) puts most mass within 1e-10 of 1; q must not round to 0.
    Stream stream(SeedSpec{1, 0, 0, 0, Purpose::SurvivalParameter});
    int tiny = 0;
    for (int i = 0; i < 20000; ++i) {
        const SurvivalParameter s = draw_survival(BetaLaw{1.0, 0.05}, stream);
        ASSERT_GT(s.q, 0.0);
        ASSERT_LT(s.p, 1.0);
        ASSERT_NEAR(s.p + s.q, 1.0, 1e-15);
        if (s.q < 1e-12) ++tiny;
    }
    EXPECT_GT(tiny, 0);
}

TEST(SamplePi, StochasticOrderInAlphaAndBeta) {
    const std::uint64_t n = 100000;
    auto sorted = [&](double a, double b) {
        auto v = draw_pi(BetaLaw{a, b}, n, 21);
        std::sort(v.begin(), v.end());
        return v;
    };
    const auto a1 = sorted(1, 1), a2 = sorted(2, 1), b2 = sorted(1, 2);
    for (int k = 1; k < 100; ++k) {
        const double x = k / 100.0;
        // larger alpha shifts mass right, larger beta shifts it left
        EXPECT_LE(ecdf(a2, x), ecdf(a1, x) + 0.01) << x;
        EXPECT_GE(ecdf(b2, x), ecdf(a1, x) - 0.01) << x;
    }
}

TEST(Pgf, ValuesAndEndpoint) {
    EXPECT_DOUBLE_EQ(pgf_occupancy(ConstantOccupancy{1}, 0.37), 0.37);
    EXPECT_DOUBLE_EQ(pgf_occupancy(PoissonOccupancy{2}, 1.0), 1.0);
    EXPECT_NEAR(pgf_occupancy(PoissonOccupancy{2}, 0.5), std::exp(-1.0), 1e-15);
    // truncated series for the Poisson pgf
    double series = 0.0, term = std::exp(-2.0);
    for (int k = 0; k < 60; ++k) {
        series += term * std::pow(0.5, k);
        term *= 2.0 / (k + 1);
    }
    EXPECT_NEAR(pgf_occupancy(PoissonOccupancy{2}, 0.5), series, 1e-14);
    EXPECT_NEAR(pgf_occupancy(GeometricOccupancy{0.5}, 0.5), 0.5 / 0.75, 1e-15);
    EXPECT_NEAR(pgf_occupancy(BernoulliOccupancy{0.3}, 0.2), 0.7 + 0.3 * 0.2, 1e-15);
    EXPECT_DOUBLE_EQ(pgf_occupancy(ConstantOccupancy{0}, 0.0), 1.0);
}

TEST(Pgf, EqualsOneAtOneForEveryVariant) {
    const std::vector<OccupancyLaw> laws = {ConstantOccupancy{0},   ConstantOccupancy{4},
                                            BernoulliOccupancy{0.2}, PoissonOccupancy{3.5},
                                            GeometricOccupancy{0.9}, GeometricOccupancy{1.0}};
    for (const auto& law : laws) EXPECT_EQ(pgf_occupancy(law, 1.0), 1.0) << describe(law);
}

TEST(Pgf, MonotoneConvexAndBounded) {
    const std::vector<OccupancyLaw> laws = {ConstantOccupancy{3}, BernoulliOccupancy{0.6},
                                            PoissonOccupancy{2}, GeometricOccupancy{0.7}};
    for (const auto& law : laws) {
        double prev = -1.0, prev_slope = -1.0;
        for (int k = 0; k <= 100; ++k) {
            const double s = k / 100.0;
            const double v = pgf_occupancy(law, s);
            ASSERT_GE(v, 0.0);
            ASSERT_LE(v, 1.0);
            ASSERT_GE(v, prev);
            if (k > 0) {
                const double slope = v - prev;
                ASSERT_GE(slope, prev_slope - 1e-12);
                prev_slope = slope;
            }
            prev = v;
        }
    }
}

TEST(Pgf, RejectsOutsideUnitInterval) {
    EXPECT_THROW(pgf_occupancy(ConstantOccupancy{1}, -0.01), std::domain_error);
    EXPECT_THROW(pgf_occupancy(PoissonOccupancy{1}, 1.01), std::domain_error);
}

TEST(Occupancy, Means) {
    EXPECT_EQ(mean_occupancy(ConstantOccupancy{3}), 3.0);
    EXPECT_EQ(mean_occupancy(BernoulliOccupancy{0.5}), 0.5);
    EXPECT_EQ(mean_occupancy(PoissonOccupancy{2.5}), 2.5);
    EXPECT_NEAR(mean_occupancy(GeometricOccupancy{0.75}), 3.0, 1e-14);
    EXPECT_TRUE(is_infinite_mean(mean_occupancy(GeometricOccupancy{1.0})));
}

TEST(Occupancy, ProbabilityOfZero) {
    EXPECT_EQ(prob_zero_occupancy(ConstantOccupancy{0}), 1.0);
    EXPECT_EQ(prob_zero_occupancy(ConstantOccupancy{2}), 0.0);
    EXPECT_NEAR(prob_zero_occupancy(PoissonOccupancy{2}), std::exp(-2.0), 1e-15);
    EXPECT_LT(prob_zero_occupancy(GeometricOccupancy{1.0}), 1.0);
}

TEST(Occupancy, ConstantSamplesAreConstant) {
    for (std::int64_t x = 0; x < 1000; ++x)
        ASSERT_EQ(sample_occupancy(ConstantOccupancy{3}, SeedSpec{1, 0, x, 0, Purpose::Occupancy}), 3);
}

TEST(Occupancy, SampleMeansWithinThreeStandardErrors) {
    struct Case {
        OccupancyLaw law;
        double var;
    };
    const std::vector<Case> cases = {{BernoulliOccupancy{0.3}, 0.21},
                                     {PoissonOccupancy{2.0}, 2.0},
                                     {GeometricOccupancy{0.5}, 0.5 / 0.25}};
    const int n = 1'000'000;
    for (const auto& c : cases) {
        Stream stream(SeedSpec{99, 0, 0, 0, Purpose::Occupancy});
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += static_cast<double>(sample_occupancy(c.law, stream));
        const double se = std::sqrt(c.var / n);
        EXPECT_NEAR(sum / n, mean_occupancy(c.law), 3.0 * se) << describe(c.law);
    }
}

TEST(Occupancy, InfiniteMeanLawIsNotSamplable) {
    EXPECT_THROW(sample_occupancy(GeometricOccupancy{1.0}, SeedSpec{}), std::domain_error);
}

TEST(Validation, RejectsBadLaws) {
    EXPECT_THROW(validate(PiLaw{PointMass{0.0}}), std::domain_error);
    EXPECT_THROW(validate(PiLaw{PointMass{1.5}}), std::domain_error);
    EXPECT_THROW(validate(PiLaw{BetaLaw{0.0, 1.0}}), std::domain_error);
    EXPECT_THROW(validate(PiLaw{BetaLaw{1.0, -1.0}}), std::domain_error);
    EXPECT_THROW(validate(OccupancyLaw{ConstantOccupancy{-1}}), std::domain_error);
    EXPECT_THROW(validate(OccupancyLaw{BernoulliOccupancy{1.2}}), std::domain_error);
    EXPECT_THROW(validate(OccupancyLaw{PoissonOccupancy{0.0}}), std::domain_error);
    EXPECT_THROW(validate(OccupancyLaw{GeometricOccupancy{-0.1}}), std::domain_error);
    EXPECT_NO_THROW(validate(PiLaw{PointMass{1.0}}));
}

TEST(Describe, Strings) {
    EXPECT_EQ(describe(PiLaw{BetaLaw{1, 0.5}}), "beta:1,0.5");
    EXPECT_EQ(describe(PiLaw{PointMass{0.25}}), "point:0.25");
    EXPECT_EQ(describe(OccupancyLaw{ConstantOccupancy{1}}), "const:1");
    EXPECT_EQ(describe(OccupancyLaw{PoissonOccupancy{2}}), "poisson:2");
}

TEST(Stream, DeterministicAndKeyed) {
    const SeedSpec a{5, 1, -3, 2, Purpose::Walk};
    Stream s1(a), s2(a);
    for (int i = 0; i < 100; ++i) ASSERT_EQ(s1(), s2());

    std::set<std::uint64_t> firsts;
    for (auto p : {Purpose::Occupancy, Purpose::SurvivalParameter, Purpose::Walk, Purpose::Coupling})
        firsts.insert(Stream(a.with_purpose(p))());
    firsts.insert(Stream(a.at(3, 2, Purpose::Walk))());
    firsts.insert(Stream(SeedSpec{5, 2, -3, 2, Purpose::Walk})());
    firsts.insert(Stream(SeedSpec{6, 1, -3, 2, Purpose::Walk})());
    EXPECT_EQ(firsts.size(), 7u);
}

TEST(Stream, RandomAccessMatchesSequence) {
    Stream s(SeedSpec{1, 2, 3, 4, Purpose::Generic});
    const Stream probe = s;
    for (std::uint64_t k = 0; k < 50; ++k) ASSERT_EQ(s(), probe.at(k));
    EXPECT_EQ(s.counter(), 50u);
}

TEST(Stream, UniformIsOpenAndRoughlyUniform) {
    Stream s(SeedSpec{42, 0, 0, 0, Purpose::Generic});
    std::vector<double> xs(200000);
    for (double& x : xs) {
        x = s.uniform();
        ASSERT_GT(x, 0.0);
        ASSERT_LT(x, 1.0);
    }
    EXPECT_LT(oracle::ks_one_sample(xs, [](double x) { return x; }), 0.005);
}
