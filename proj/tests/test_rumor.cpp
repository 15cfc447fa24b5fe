#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "frogz/rumor.hpp"
#include "oracles.hpp"

using namespace frogz;

namespace {

SeedSpec seed_of(std::uint64_t master) {
    SeedSpec s;
    s.master_seed = master;
    return s;
}

RadiusFn table(std::vector<std::int64_t> radii) {
    return [radii = std::move(radii)](std::int64_t z) -> std::int64_t {
        const auto i = static_cast<std::size_t>(z < 0 ? -z : z);
        return i < radii.size() ? radii[i] : 0;
    };
}

}  // namespace

TEST(Radius, TailsOfEachModel) {
    EXPECT_EQ(radius_tail(BernoulliRadius{0.3}, 0), 1.0);
    EXPECT_EQ(radius_tail(BernoulliRadius{0.3}, 1), 0.3);
    EXPECT_EQ(radius_tail(BernoulliRadius{0.3}, 2), 0.0);
    EXPECT_DOUBLE_EQ(radius_tail(GeometricTail{0.5}, 3), 0.125);
    EXPECT_DOUBLE_EQ(radius_tail(PowerLawTail{2.0}, 8), 0.2);
    const AnalyticTail half{[](std::int64_t n) { return std::pow(0.5, static_cast<double>(n)); }};
    EXPECT_DOUBLE_EQ(radius_tail(half, 4), 0.0625);
}

TEST(Radius, CdfFromOccupancy) {
    // Poisson(2) spreaders with Bernoulli(0.3) radii: P(I = 0) = exp(-0.6)
    EXPECT_NEAR(radius_cdf_from_occupancy(PoissonOccupancy{2.0}, BernoulliRadius{0.3}, 0),
                0.548811636094026, 1e-14);
    EXPECT_EQ(radius_cdf_from_occupancy(PoissonOccupancy{2.0}, BernoulliRadius{0.3}, 1), 1.0);
    EXPECT_NEAR(radius_cdf_from_occupancy(ConstantOccupancy{3}, GeometricTail{0.5}, 1),
                std::pow(0.75, 3), 1e-15);
    // no spreaders: I = 0 always
    EXPECT_EQ(radius_cdf_from_occupancy(ConstantOccupancy{0}, PowerLawTail{1.0}, 0), 1.0);
    EXPECT_THROW(radius_cdf_from_occupancy(ConstantOccupancy{1}, PowerLawTail{1.0}, -1), std::domain_error);
}

TEST(Radius, SamplersMatchTheirTails) {
    const RadiusModel models[] = {
        GeometricTail{0.7},
        PowerLawTail{1.5},
        BernoulliRadius{0.4},
        AnalyticTail{[](std::int64_t n) { return 1.0 / (1.0 + static_cast<double>(n * n)); }},
    };
    for (const auto& m : models) {
        std::vector<std::int64_t> xs(200'000);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            SeedSpec s = seed_of(5);
            s.particle = i;
            Stream stream(s);
            xs[i] = sample_radius(m, stream);
        }
        const auto tail = oracle::empirical_tail(xs, 30);
        for (int n = 0; n <= 30; ++n) EXPECT_NEAR(tail[n], radius_tail(m, n), 0.005) << describe(m) << " " << n;
    }
}

TEST(Radius, FieldMatchesOccupancyCdf) {
    const RadiusField field(PoissonOccupancy{2.0}, BernoulliRadius{0.3}, seed_of(7));
    std::uint64_t zeros = 0;
    const std::uint64_t n = 200'000;
    for (std::uint64_t z = 0; z < n; ++z) zeros += field(static_cast<std::int64_t>(z)) == 0;
    EXPECT_TRUE(oracle::within_wilson(std::exp(-0.6), zeros, n));
    EXPECT_EQ(field(17), field(17));
}

TEST(Radius, PmfFoldsTheTail) {
    const auto pmf = radius_pmf(ConstantOccupancy{1}, GeometricTail{0.5}, 4);
    ASSERT_EQ(pmf.size(), 5u);
    EXPECT_DOUBLE_EQ(pmf[0], 0.5);
    EXPECT_DOUBLE_EQ(pmf[3], 0.0625);
    EXPECT_DOUBLE_EQ(pmf[4], 0.0625);
    EXPECT_THROW(radius_pmf(ConstantOccupancy{1}, GeometricTail{0.5}, 65), std::length_error);
}

TEST(Radius, Validation) {
    EXPECT_THROW(validate(RadiusModel{GeometricTail{1.0}}), std::domain_error);
    EXPECT_THROW(validate(RadiusModel{BernoulliRadius{1.5}}), std::domain_error);
    EXPECT_THROW(validate(RadiusModel{PowerLawTail{0.0}}), std::domain_error);
    EXPECT_THROW(validate(RadiusModel{AnalyticTail{}}), std::domain_error);
    EXPECT_EQ(describe(RadiusModel{PowerLawTail{2.0}}), "powerlaw:2");
}

TEST(Radius, EmpiricalSampler) {
    auto draw = [](Stream& s) -> std::int64_t { return static_cast<std::int64_t>(s() % 4); };
    const auto e = make_empirical_sampler(draw, 100'000, seed_of(3));
    EXPECT_EQ(radius_tail(e, 0), 1.0);
    EXPECT_NEAR(radius_tail(e, 1), 0.75, 0.01);
    EXPECT_NEAR(radius_tail(e, 3), 0.25, 0.01);
    EXPECT_EQ(radius_tail(e, 4), 0.0);
    EXPECT_EQ(radius_tail(e, 100), 0.0);
    EXPECT_THROW(make_empirical_sampler(draw, 0, seed_of(3)), std::invalid_argument);
    auto negative = [](Stream&) -> std::int64_t { return -1; };
    EXPECT_THROW(make_empirical_sampler(negative, 10, seed_of(3)), std::domain_error);
}

TEST(Firework, HandBuiltRadii) {
    auto r = run_firework(table({2, 0, 0, 5}), 10);
    EXPECT_FALSE(r.reached);
    EXPECT_EQ(r.front, 2);
    ASSERT_TRUE(r.extinction_step.has_value());

    r = run_firework(table({1, 1, 1, 1, 1}), 5);
    EXPECT_TRUE(r.reached);
    EXPECT_EQ(r.front, 5);
    EXPECT_EQ(r.front_trace, (std::vector<std::int64_t>{1, 2, 3, 4, 5}));

    r = run_firework(table({1000}), 10);
    EXPECT_TRUE(r.reached);
    EXPECT_EQ(r.front, 10);

    r = run_firework(table({0}), 10);
    EXPECT_FALSE(r.reached);
    EXPECT_EQ(r.front, 0);
    EXPECT_THROW(run_firework(table({1}), 0), std::invalid_argument);
}

TEST(Firework, FrontTraceIsMonotone) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto r = run_firework(ConstantOccupancy{1}, PowerLawTail{1.2}, 500, seed_of(seed));
        for (std::size_t i = 1; i < r.front_trace.size(); ++i) ASSERT_GE(r.front_trace[i], r.front_trace[i - 1]);
        EXPECT_EQ(r.reached, r.front == 500);
    }
}

TEST(Firework, BernoulliChainReachesWithProbabilityQToTheM) {
    for (double q : {0.5, 0.9}) {
        const std::int64_t m = 10;
        const auto est = estimate_rumor_reach(RumorProcess::Firework, ConstantOccupancy{1}, BernoulliRadius{q},
                                              m, 100'000, seed_of(11));
        EXPECT_TRUE(oracle::within_wilson(std::pow(q, m), est.hits, est.trials)) << q << " " << est.estimate;
    }
}

TEST(Bidirectional, HandBuiltRadii) {
    // the root informs -1, whose radius covers the whole window
    const auto r = run_bfw([](std::int64_t z) -> std::int64_t { return z == 0 ? 1 : (z == -1 ? 9 : 0); }, 5);
    EXPECT_TRUE(r.reached_left);
    EXPECT_TRUE(r.reached_right);
    EXPECT_EQ(r.left, -5);
    EXPECT_EQ(r.right, 5);

    const auto dead = run_bfw(table({0}), 5);
    EXPECT_FALSE(dead.reached_any());
    EXPECT_EQ(dead.left, 0);
    EXPECT_EQ(dead.right, 0);
    EXPECT_TRUE(dead.extinction_step.has_value());
}

TEST(Bidirectional, ContainsFirework) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const RadiusField field(PoissonOccupancy{1.0}, PowerLawTail{1.0}, seed_of(seed));
        const auto fw = run_firework(field.fn(), 300);
        const auto bfw = run_bfw(field.fn(), 300);
        ASSERT_LE(fw.front, bfw.right) << seed;
        for (std::size_t i = 1; i < bfw.trace.size(); ++i) {
            ASSERT_LE(bfw.trace[i].first, bfw.trace[i - 1].first);
            ASSERT_GE(bfw.trace[i].second, bfw.trace[i - 1].second);
        }
    }
}

TEST(Mirrored, IsSymmetric) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto r = run_bfw_star(ConstantOccupancy{1}, PowerLawTail{1.0}, 200, seed_of(seed));
        ASSERT_EQ(r.left, -r.right) << seed;
        ASSERT_EQ(r.reached_left, r.reached_right);
    }
}

TEST(Processes, NamesRoundTrip) {
    for (auto p : {RumorProcess::Firework, RumorProcess::Bidirectional, RumorProcess::Mirrored})
        EXPECT_EQ(parse_rumor_process(to_string(p)), p);
    EXPECT_THROW(parse_rumor_process("rumour"), std::invalid_argument);
}

TEST(ReachDp, BernoulliChainClosedForm) {
    for (double q : {0.5, 0.9}) {
        const std::vector<double> pmf{1.0 - q, q};
        for (std::int64_t m = 1; m <= 20; ++m)
            EXPECT_NEAR(fw_reach_probability_dp(pmf, m), std::pow(q, static_cast<double>(m)), 1e-12) << q << " " << m;
    }
}

TEST(ReachDp, DeterministicRadiusAlwaysReaches) {
    EXPECT_DOUBLE_EQ(fw_reach_probability_dp(std::vector<double>{0.0, 0.0, 1.0}, 1000), 1.0);
    EXPECT_DOUBLE_EQ(fw_reach_probability_dp(std::vector<double>{1.0}, 5), 0.0);
}

TEST(ReachDp, MonotoneInWindowAndStochasticOrder) {
    const std::vector<double> low{0.3, 0.4, 0.2, 0.1};
    const std::vector<double> high{0.2, 0.4, 0.2, 0.2};  // stochastically larger
    double prev = 1.0;
    for (std::int64_t m = 1; m <= 200; ++m) {
        const double v = fw_reach_probability_dp(low, m);
        EXPECT_LE(v, prev + 1e-15);
        EXPECT_LE(v, fw_reach_probability_dp(high, m) + 1e-15);
        prev = v;
    }
}

TEST(ReachDp, RejectsBadInput) {
    EXPECT_THROW(fw_reach_probability_dp(std::vector<double>{}, 5), std::length_error);
    EXPECT_THROW(fw_reach_probability_dp(std::vector<double>(66, 1.0 / 66), 5), std::length_error);
    EXPECT_THROW(fw_reach_probability_dp(std::vector<double>{0.5, 0.5}, 0), std::length_error);
    EXPECT_THROW(fw_reach_probability_dp(std::vector<double>{0.5, 0.5}, 10001), std::length_error);
    EXPECT_THROW(fw_reach_probability_dp(std::vector<double>{0.5, 0.4}, 5), std::domain_error);
    EXPECT_THROW(fw_reach_probability_dp(std::vector<double>{1.5, -0.5}, 5), std::domain_error);
}

TEST(ReachDp, AgreesWithSimulation) {
    const std::vector<double> pmf{0.25, 0.35, 0.25, 0.15};
    const AnalyticTail tail{[pmf](std::int64_t n) {
        double t = 0.0;
        for (std::size_t k = static_cast<std::size_t>(n); k < pmf.size(); ++k) t += pmf[k];
        return t;
    }};
    const std::int64_t m = 25;
    const auto est = estimate_rumor_reach(RumorProcess::Firework, ConstantOccupancy{1}, tail, m, 50'000, seed_of(21));
    EXPECT_TRUE(oracle::within_wilson(fw_reach_probability_dp(pmf, m), est.hits, est.trials)) << est.estimate;
}

TEST(Coupling, NestedOnSharedRandomness) {
    const auto audit = audit_rumor_coupling(PoissonOccupancy{1.0}, PowerLawTail{1.5}, 200, 2000, seed_of(4));
    EXPECT_EQ(audit.violations(), 0u);
    EXPECT_LE(audit.fw_reached, audit.bfw_reached);
    EXPECT_LE(audit.bfw_reached, audit.fw_star_reached);
    EXPECT_GT(audit.fw_reached, 0u);
}

TEST(Series, GeometricRadiusDiverges) {
    const auto d = series_criterion(ConstantOccupancy{1}, GeometricTail{0.5}, 10000);
    EXPECT_EQ(d.classification, SeriesClass::Diverging);
    EXPECT_FALSE(d.fw_percolation_predicted());
    EXPECT_TRUE(d.bfw_extinction_certified());
    EXPECT_NEAR(d.decay_exponent, 0.0, 1e-6);
}

TEST(Series, PowerLawFlipsAtOne) {
    for (double c : {0.5, 0.9}) {
        const auto d = series_criterion(ConstantOccupancy{1}, PowerLawTail{c}, 10000);
        EXPECT_EQ(d.classification, SeriesClass::Diverging) << c;
        EXPECT_NEAR(d.decay_exponent, -c, 0.01);
    }
    for (double c : {1.5, 2.0}) {
        const auto d = series_criterion(ConstantOccupancy{1}, PowerLawTail{c}, 10000);
        EXPECT_EQ(d.classification, SeriesClass::Converging) << c;
        EXPECT_TRUE(d.fw_percolation_predicted());
        EXPECT_NEAR(d.decay_exponent, -c, 0.01);
    }
    // squared products decay like n^(-2c): c = 0.9 converges, c = 0.4 diverges
    EXPECT_EQ(series_criterion(ConstantOccupancy{1}, PowerLawTail{0.9}, 10000).squared_classification,
              SeriesClass::Converging);
    EXPECT_EQ(series_criterion(ConstantOccupancy{1}, PowerLawTail{0.4}, 10000).squared_classification,
              SeriesClass::Diverging);
}

TEST(Series, CriticalExponentIsInconclusive) {
    const auto d = series_criterion(ConstantOccupancy{1}, PowerLawTail{1.0}, 10000);
    EXPECT_EQ(d.classification, SeriesClass::Inconclusive);
}

TEST(Series, Diagnostics) {
    const auto d = series_criterion(ConstantOccupancy{1}, PowerLawTail{2.0}, 1000);
    ASSERT_EQ(d.partial_sums.size(), 1000u);
    for (std::size_t i = 1; i < d.partial_sums.size(); ++i) {
        EXPECT_GE(d.partial_sums[i], d.partial_sums[i - 1]);
        EXPECT_GE(d.squared_partial_sums[i], d.squared_partial_sums[i - 1]);
    }
    EXPECT_NEAR(d.tail_liminf_proxy, 2.0 * 100.0 / 102.0, 1e-12);
    EXPECT_LT(d.tail_limsup_proxy, 2.0);
    EXPECT_DOUBLE_EQ(d.inverse_mean, 1.0);
    EXPECT_THROW(series_criterion(ConstantOccupancy{1}, PowerLawTail{2.0}, 99), std::invalid_argument);
}

TEST(Series, BoundedRadiusNeverPercolates) {
    const auto d = series_criterion(ConstantOccupancy{1}, BernoulliRadius{0.5}, 200);
    EXPECT_EQ(d.classification, SeriesClass::Diverging);
}

TEST(Series, RadiusBoundedBelowMakesProductsVanish) {
    const AnalyticTail at_least_three{[](std::int64_t n) { return n <= 3 ? 1.0 : 0.0; }};
    const auto d = series_criterion(ConstantOccupancy{1}, at_least_three, 200);
    EXPECT_EQ(d.classification, SeriesClass::Converging);
    EXPECT_EQ(d.partial_sums.back(), 0.0);
}
