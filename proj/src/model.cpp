#include "stochhawkes/model.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace stochhawkes {

namespace {

void require_time(double t) {
    if (!(t >= 0.0)) {
        throw std::invalid_argument("time must be non-negative, got " + std::to_string(t));
    }
}

// int_0^t base_intensity
double base_compensator(double t, const HawkesParams& p) {
    return p.a * t - (p.lambda0 - p.a) * std::expm1(-p.delta * t) / p.delta;
}

}  // namespace

double base_intensity(double t, const HawkesParams& params) {
    require_time(t);
    return params.a + (params.lambda0 - params.a) * std::exp(-params.delta * t);
}

double intensity_at(double t, const EventSequence& events, std::span<const double> y,
                    const HawkesParams& params) {
    check_aligned(events, y);
    double lambda = base_intensity(t, params);
    const auto times = events.times();
    for (std::size_t i = 0; i < times.size() && times[i] < t; ++i) {
        lambda += y[i] * std::exp(-params.delta * (t - times[i]));
    }
    return lambda;
}

std::vector<double> intensity_left_limits(const EventSequence& events, std::span<const double> y,
                                          const HawkesParams& params) {
    check_aligned(events, y);
    const auto times = events.times();
    std::vector<double> out(times.size());
    double excitation = 0.0;  // sum_{j<i} Y_j e^{-delta (T_i - T_j)}
    double previous = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        excitation *= std::exp(-params.delta * (times[i] - previous));
        out[i] = base_intensity(times[i], params) + excitation;
        excitation += y[i];
        previous = times[i];
    }
    return out;
}

double integrated_intensity(double t, const EventSequence& events, std::span<const double> y,
                            const HawkesParams& params) {
    require_time(t);
    check_aligned(events, y);
    double triggered = 0.0;
    const auto times = events.times();
    for (std::size_t i = 0; i < times.size() && times[i] <= t; ++i) {
        triggered -= y[i] * std::expm1(-params.delta * (t - times[i]));
    }
    return base_compensator(t, params) + triggered / params.delta;
}

std::vector<double> compensator_at_events(const EventSequence& events, std::span<const double> y,
                                          const HawkesParams& params) {
    check_aligned(events, y);
    const auto times = events.times();
    std::vector<double> out(times.size());
    double excitation = 0.0;  // excitation just after the previous event
    double previous = 0.0;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double gap = times[i] - previous;
        const double decay_fraction = -std::expm1(-params.delta * gap);
        cumulative += base_compensator(times[i], params) - base_compensator(previous, params) +
                      excitation * decay_fraction / params.delta;
        out[i] = cumulative;
        excitation = excitation * (1.0 - decay_fraction) + y[i];
        previous = times[i];
    }
    return out;
}

double log_likelihood(const EventSequence& events, const BranchingStructure& z,
                      std::span<const double> y, const HawkesParams& params) {
    check_aligned(events, y);
    if (z.size() != events.size()) {
        throw std::invalid_argument("branching structure length does not match event count");
    }
    const auto times = events.times();
    double total = -integrated_intensity(events.horizon(), events, y, params);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const std::size_t slot = z.parent[i];
        if (slot == BranchingStructure::kImmigrant) {
            total += std::log(base_intensity(times[i], params));
            continue;
        }
        if (slot > i) {
            throw std::invalid_argument("branching structure references a later event");
        }
        const std::size_t j = slot - 1;
        if (!(y[j] > 0.0)) {
            return -std::numeric_limits<double>::infinity();
        }
        total += std::log(y[j]) - params.delta * (times[i] - times[j]);
    }
    return total;
}

double point_process_log_likelihood(const EventSequence& events, std::span<const double> y,
                                    const HawkesParams& params) {
    double total = -integrated_intensity(events.horizon(), events, y, params);
    for (double lambda : intensity_left_limits(events, y, params)) {
        total += std::log(lambda);
    }
    return total;
}

}  // namespace stochhawkes
