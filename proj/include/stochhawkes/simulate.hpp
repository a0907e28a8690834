#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "stochhawkes/random.hpp"
#include "stochhawkes/types.hpp"

namespace stochhawkes {

struct IntensitySample {
    double t;
    double lambda;
};

struct SimulationResult {
    EventSequence events;
    ContagionPath contagion;
    std::vector<IntensitySample> intensity_trace;  // empty unless requested
    std::size_t candidates{0};                     // proposals drawn, accepted or not
};

struct SimulationOptions {
    bool record_trace{false};
    /// Stop after this many events. The returned horizon is then the last event time.
    std::size_t max_events{std::numeric_limits<std::size_t>::max()};
};

/// Decomposition sampler: each inter-arrival is the minimum of an immigrant waiting
/// time with rate a and the first arrival of the decaying excitation, sampled in
/// closed form. Theta(1) work per event. When lambda0 < a the negative part of the
/// base intensity is removed by thinning.
SimulationResult simulate(const HawkesParams& params, const SdeSpec& spec, double horizon, Rng& rng,
                          const SimulationOptions& options = {});

/// Ogata thinning against a bound recomputed from the full history at every
/// candidate. Theta(n) per candidate; used as a validation oracle.
SimulationResult simulate_ogata(const HawkesParams& params, const SdeSpec& spec, double horizon, Rng& rng,
                                const SimulationOptions& options = {});

/// 512 (by default) uniform points on [0, T] plus both one-sided limits at every event.
std::vector<IntensitySample> intensity_trace(const EventSequence& events, std::span<const double> y,
                                             const HawkesParams& params, std::size_t uniform_points = 512);

}  // namespace stochhawkes
