#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "stochhawkes/diagnostics.hpp"
#include "stochhawkes/model.hpp"
#include "stochhawkes/simulate.hpp"

using namespace stochhawkes;

TEST(Kolmogorov, KnownValues) {
    // Critical values of the Kolmogorov distribution.
    EXPECT_NEAR(kolmogorov_survival(1.3581), 0.05, 1e-4);
    EXPECT_NEAR(kolmogorov_survival(1.6276), 0.01, 1e-4);
    EXPECT_NEAR(kolmogorov_survival(0.0), 1.0, 1e-12);
    EXPECT_NEAR(kolmogorov_survival(0.2), 1.0, 1e-6);
}

TEST(KsExponential, AcceptsExponentialRejectsShifted) {
    std::mt19937_64 gen(1);
    std::exponential_distribution<double> e1(1.0), e2(0.5);
    std::vector<double> good, bad;
    for (int i = 0; i < 2000; ++i) {
        good.push_back(e1(gen));
        bad.push_back(e2(gen));
    }
    EXPECT_GT(ks_test_exponential(good).p_value, 0.01);
    EXPECT_LT(ks_test_exponential(bad).p_value, 1e-6);
    EXPECT_THROW(ks_test_exponential({}), InsufficientData);
}

TEST(KsTwoSample, SameAndDifferentLaws) {
    std::mt19937_64 gen(2);
    std::normal_distribution<double> n0(0.0, 1.0), n1(0.3, 1.0);
    std::vector<double> a, b, c;
    for (int i = 0; i < 3000; ++i) {
        a.push_back(n0(gen));
        b.push_back(n0(gen));
        c.push_back(n1(gen));
    }
    EXPECT_GT(ks_test_two_sample(a, b).p_value, 0.01);
    EXPECT_LT(ks_test_two_sample(a, c).p_value, 1e-6);
}

TEST(TimeRescaling, NeedsFiftyEvents) {
    std::vector<double> t;
    for (int i = 1; i <= 49; ++i) t.push_back(i * 0.1);
    const EventSequence ev(t, 5.0);
    EXPECT_THROW(time_rescaling_test(ev, std::vector<double>(49, 0.0), {1.0, 1.0, 1.0}), InsufficientData);
}

TEST(TimeRescaling, PoissonPValuesAreUniform) {
    Rng rng(3);
    const HawkesParams p{2.0, 2.0, 1.0};
    int below_tenth = 0;
    const int reps = 400;
    for (int r = 0; r < reps; ++r) {
        const auto sim = simulate(p, SdeSpec::constant(0.0), 100.0, rng);
        const std::vector<double> y(sim.events.size(), 0.0);
        below_tenth += time_rescaling_test(sim.events, y, p).p_value < 0.1;
    }
    EXPECT_NEAR(static_cast<double>(below_tenth) / reps, 0.1, 4.0 * std::sqrt(0.09 / reps));
}

TEST(TimeRescaling, DetectsWrongRate) {
    Rng rng(4);
    const auto sim = simulate({4.0, 4.0, 1.0}, SdeSpec::constant(0.0), 500.0, rng);
    ASSERT_GE(sim.events.size(), 1900u);
    const std::vector<double> y(sim.events.size(), 0.0);
    EXPECT_LT(time_rescaling_test(sim.events, y, {2.0, 2.0, 1.0}).p_value, 0.01);
}

TEST(TimeRescaling, InvariantToJointTimeShift) {
    Rng rng(5);
    const HawkesParams p{2.0, 2.0, 1.5};
    const auto sim = simulate(p, SdeSpec::constant(0.5), 60.0, rng);
    ASSERT_GE(sim.events.size(), 50u);
    // Shifting by s with the base already at a (lambda0 = a) leaves the rescaled gaps unchanged.
    std::vector<double> shifted;
    for (double t : sim.events.times()) shifted.push_back(t + 10.0);
    const EventSequence moved(shifted, 70.0);
    const auto r1 = time_rescaling_test(sim.events, sim.contagion, p);
    auto gaps = rescaled_gaps(moved, sim.contagion, p);
    gaps[0] -= 2.0 * 10.0;  // the first gap also covers the empty stretch [0, 10)
    const auto r2 = ks_test_exponential(gaps);
    EXPECT_NEAR(r1.statistic, r2.statistic, 1e-9);
}

TEST(MeanExcitation, ClosedForms) {
    EXPECT_DOUBLE_EQ(mean_excitation(SdeSpec::constant(0.4))(3.0), 0.4);
    EXPECT_DOUBLE_EQ(mean_excitation(SdeSpec::iid_gamma(2.0, 4.0))(3.0), 0.5);
    EXPECT_NEAR(mean_excitation(SdeSpec::gbm(0.1, 0.2, 0.5))(2.0), 0.5 * std::exp(0.2 * 2.0), 1e-15);
    // Langevin at a long horizon reaches its stationary lognormal mean.
    EXPECT_NEAR(mean_excitation(SdeSpec::exp_langevin(1.0, 0.2, 0.3, 5.0))(200.0), std::exp(0.2 + 0.3 / 4.0), 1e-12);
}

TEST(RenewalCurve, ZeroExcitationIsBase) {
    const HawkesParams p{1.0, 3.0, 0.7};
    const std::vector<double> grid{0.0, 0.5, 1.0, 4.0, 9.0};
    const auto m = expected_intensity_curve(p, [](double) { return 0.0; }, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(m[i], base_intensity(grid[i], p), 1e-9);
}

TEST(RenewalCurve, ConstantExcitationClosedForm) {
    const double a = 1.2, delta = 2.0, c = 0.8;
    const HawkesParams p{a, a, delta};
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(i * 0.25);
    const auto m = expected_intensity_curve(p, [&](double) { return c; }, grid);
    const double limit = a * delta / (delta - c);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double expected = limit - (limit - a) * std::exp(-(delta - c) * grid[i]);
        EXPECT_NEAR(m[i], expected, 1e-6 * expected);
    }
}

TEST(RenewalCurve, RejectsBadGrid) {
    const std::vector<double> grid{0.0, 1.0, 1.0};
    EXPECT_THROW(expected_intensity_curve({}, [](double) { return 0.0; }, grid), std::invalid_argument);
}

TEST(ChainSummary, ConstantChainIsDegenerate) {
    Chain chain;
    chain.kind = SdeKind::constant;
    for (int i = 0; i < 100; ++i) {
        chain.iterations.push_back(i);
        chain.states.push_back({{1.0, 2.0, 3.0}, SdeSpec::constant(0.5), {}, {}});
        chain.log_likelihood.push_back(-1.0);
    }
    const auto summary = chain_summary(chain);
    ASSERT_EQ(summary.size(), 4u);
    for (const auto& s : summary) {
        EXPECT_TRUE(s.degenerate);
        EXPECT_LE(s.ess, 1.0);
    }
}

TEST(ChainSummary, WhiteNoiseEss) {
    std::mt19937_64 gen(6);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> x(5000);
    for (double& v : x) v = n(gen);
    EXPECT_NEAR(effective_sample_size(x), 5000.0, 1000.0);
}

TEST(ChainSummary, IdenticalChainsRhat) {
    std::mt19937_64 gen(7);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> x(2000);
    for (double& v : x) v = n(gen);
    EXPECT_NEAR(split_rhat({x, x}), 1.0, 0.01);
    std::vector<double> shifted = x;
    for (double& v : shifted) v += 3.0;
    EXPECT_GT(split_rhat({x, shifted}), 1.5);
}

TEST(ChainSummary, Quantiles) {
    const std::vector<double> v{4.0, 1.0, 3.0, 2.0};
    EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(quantile(v, 1.0), 4.0);
    EXPECT_DOUBLE_EQ(quantile(v, 0.5), 2.5);
    EXPECT_THROW(quantile({}, 0.5), InsufficientData);
}

TEST(Geweke, ZeroRoundsIsInsufficient) {
    GewekeConfig g;
    g.rounds = 0;
    EXPECT_THROW(geweke_joint_test(SdeKind::gbm, geweke_hyperparams(), g), InsufficientData);
}
