#include <cmath>

#include <gtest/gtest.h>

#include "stochhawkes/diagnostics.hpp"
#include "stochhawkes/model.hpp"
#include "stochhawkes/simulate.hpp"

using namespace stochhawkes;

namespace {

double mean_count(bool ogata, const HawkesParams& p, const SdeSpec& spec, double horizon, int runs, Rng& rng) {
    double total = 0.0;
    for (int r = 0; r < runs; ++r) {
        total += static_cast<double>(ogata ? simulate_ogata(p, spec, horizon, rng).events.size()
                                           : simulate(p, spec, horizon, rng).events.size());
    }
    return total / runs;
}

}  // namespace

TEST(Simulate, PoissonReduction) {
    Rng rng(1);
    const double mean = mean_count(false, {2.0, 2.0, 1.0}, SdeSpec::constant(0.0), 10.0, 10000, rng);
    EXPECT_NEAR(mean, 20.0, 4.0 * std::sqrt(20.0 / 1e4));
}

TEST(SimulateOgata, PoissonReduction) {
    Rng rng(2);
    const double mean = mean_count(true, {2.0, 2.0, 1.0}, SdeSpec::constant(0.0), 10.0, 10000, rng);
    EXPECT_NEAR(mean, 20.0, 4.0 * std::sqrt(20.0 / 1e4));
}

TEST(Simulate, ZeroHorizon) {
    Rng rng(3);
    EXPECT_TRUE(simulate({1.0, 1.0, 1.0}, SdeSpec::constant(0.5), 0.0, rng).events.empty());
    EXPECT_THROW(simulate({1.0, 1.0, 1.0}, SdeSpec::constant(0.5), -1.0, rng), std::invalid_argument);
}

TEST(Simulate, EventsOrderedWithinHorizon) {
    Rng rng(4);
    const auto sim = simulate({1.0, 3.0, 2.0}, SdeSpec::gbm(0.0, 0.01, 0.8), 50.0, rng);
    ASSERT_FALSE(sim.events.empty());
    EXPECT_EQ(sim.events.size(), sim.contagion.size());
    double prev = 0.0;
    for (double t : sim.events.times()) {
        EXPECT_GT(t, prev);
        EXPECT_LE(t, 50.0);
        prev = t;
    }
}

TEST(Simulate, SeedReproducible) {
    Rng r1(42), r2(42);
    const auto spec = SdeSpec::exp_langevin(1.0, -0.3, 0.4, 0.6);
    const auto a = simulate({1.0, 2.0, 1.5}, spec, 40.0, r1);
    const auto b = simulate({1.0, 2.0, 1.5}, spec, 40.0, r2);
    EXPECT_TRUE(std::equal(a.events.times().begin(), a.events.times().end(), b.events.times().begin(),
                           b.events.times().end()));
    EXPECT_EQ(a.contagion, b.contagion);
}

TEST(Simulate, TraceMatchesIntensity) {
    Rng rng(5);
    SimulationOptions opt;
    opt.record_trace = true;
    const HawkesParams p{1.0, 2.0, 1.5};
    const auto sim = simulate(p, SdeSpec::iid_gamma(2.0, 3.0), 20.0, rng, opt);
    ASSERT_FALSE(sim.intensity_trace.empty());
    for (const auto& s : sim.intensity_trace) {
        // Right limits are recorded at event times; compare against the slightly later value.
        const double left = intensity_at(s.t, sim.events, sim.contagion, p);
        const double right = intensity_at(std::min(s.t + 1e-12, 20.0), sim.events, sim.contagion, p);
        EXPECT_TRUE(std::abs(s.lambda - left) < 1e-9 * left || std::abs(s.lambda - right) < 1e-6 * right)
            << "t=" << s.t;
    }
}

TEST(Simulate, ClassicalHawkesStationaryRate) {
    Rng rng(6);
    const double a = 1.0, delta = 2.0, psi = 1.0;
    const double horizon = 4000.0;
    const auto sim = simulate({a, a * delta / (delta - psi), delta}, SdeSpec::constant(psi), horizon, rng);
    const double rate = static_cast<double>(sim.events.size()) / horizon;
    EXPECT_NEAR(rate, a * delta / (delta - psi), 0.15 * a * delta / (delta - psi));
}

TEST(Simulate, TimeRescalingPassesForEachKind) {
    const HawkesParams p{2.0, 4.0, 3.0};
    const std::vector<SdeSpec> specs{SdeSpec::constant(1.0), SdeSpec::iid_gamma(2.0, 2.0),
                                     SdeSpec::gbm(-0.005, 0.01, 1.0), SdeSpec::exp_langevin(0.5, 0.0, 0.2, 1.0)};
    Rng rng(7);
    for (const auto& spec : specs) {
        const auto sim = simulate(p, spec, 400.0, rng);
        ASSERT_GE(sim.events.size(), 50u);
        EXPECT_GT(time_rescaling_test(sim.events, sim.contagion, p).p_value, 1e-4) << to_string(spec.kind());
    }
}

TEST(Simulate, BaseBelowAsymptote) {
    // lambda0 < a: the base rate rises from lambda0 to a; compare the expected count.
    Rng rng(8);
    const HawkesParams p{3.0, 0.2, 0.5};
    const double horizon = 4.0;
    const double expected = p.a * horizon + (p.lambda0 - p.a) * (1.0 - std::exp(-p.delta * horizon)) / p.delta;
    const double mean = mean_count(false, p, SdeSpec::constant(0.0), horizon, 20000, rng);
    EXPECT_NEAR(mean, expected, 4.0 * std::sqrt(expected / 2e4));
}

TEST(Simulate, MaxEventsCap) {
    Rng rng(9);
    SimulationOptions opt;
    opt.max_events = 25;
    EXPECT_EQ(simulate({5.0, 5.0, 1.0}, SdeSpec::constant(0.0), 100.0, rng, opt).events.size(), 25u);
}

TEST(IntensityTrace, IncludesBothLimits) {
    const EventSequence ev({1.0}, 2.0);
    const std::vector<double> y{2.0};
    const auto trace = intensity_trace(ev, y, {1.0, 1.0, 1.0}, 8);
    bool left = false, right = false;
    for (const auto& s : trace) {
        if (s.t == 1.0 && std::abs(s.lambda - 1.0) < 1e-12) left = true;
        if (s.t == 1.0 && std::abs(s.lambda - 3.0) < 1e-12) right = true;
    }
    EXPECT_TRUE(left);
    EXPECT_TRUE(right);
}
