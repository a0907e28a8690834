#include "stochhawkes/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "stochhawkes/model.hpp"
#include "stochhawkes/sde.hpp"

namespace stochhawkes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_inputs(const HawkesParams& params, const SdeSpec& spec, double horizon) {
    params.validate();
    spec.validate();
    if (!std::isfinite(horizon) || horizon < 0.0) {
        throw std::invalid_argument("simulation horizon must be finite and non-negative");
    }
}

SimulationResult finish(std::vector<double> times, ContagionPath levels, double horizon, bool truncated,
                        std::size_t candidates, const HawkesParams& params, bool record_trace) {
    const double end = truncated && !times.empty() ? times.back() : horizon;
    SimulationResult result{EventSequence(std::move(times), end), std::move(levels), {}, candidates};
    if (record_trace) {
        result.intensity_trace = intensity_trace(result.events, result.contagion, params);
    }
    return result;
}

}  // namespace

SimulationResult simulate(const HawkesParams& params, const SdeSpec& spec, double horizon, Rng& rng,
                          const SimulationOptions& options) {
    validate_inputs(params, spec, horizon);
    const double a = params.a;
    const double delta = params.delta;

    // lambda^(1): the part of the intensity above a that decays at rate delta. A
    // negative lambda0 - a cannot be sampled by the decomposition, so it is kept
    // aside as a deficit and removed by thinning.
    double excitation = std::max(0.0, params.lambda0 - a);
    const double initial_deficit = std::min(0.0, params.lambda0 - a);

    std::vector<double> times;
    ContagionPath levels;
    double t = 0.0;
    double last_event = 0.0;
    double level = spec.y0;
    std::size_t candidates = 0;
    bool truncated = false;

    while (true) {
        if (times.size() >= options.max_events) {
            truncated = true;
            break;
        }
        const double immigrant_wait = -std::log(rng.uniform()) / a;
        const double log_u = std::log(rng.uniform());
        double excitation_wait = kInf;
        if (excitation > 0.0) {
            const double d = 1.0 + delta * log_u / excitation;
            if (d > 0.0) {
                excitation_wait = -std::log(d) / delta;
            }
        }
        const double wait = std::min(immigrant_wait, excitation_wait);
        if (t + wait > horizon) {
            break;
        }
        if (!(t + wait > t)) {
            throw NumericalError("simulate: intensity too large to separate event times at t=" + std::to_string(t) +
                                 " (the process has exploded)");
        }
        t += wait;
        ++candidates;
        excitation *= std::exp(-delta * wait);

        if (initial_deficit < 0.0) {
            const double dominating = a + excitation;
            const double actual = dominating + initial_deficit * std::exp(-delta * t);
            if (rng.uniform() * dominating > actual) {
                continue;
            }
        }

        level = sample_next_level(spec, level, t - last_event, rng);
        excitation += level;
        times.push_back(t);
        levels.push_back(level);
        last_event = t;
    }
    return finish(std::move(times), std::move(levels), horizon, truncated, candidates, params,
                  options.record_trace);
}

SimulationResult simulate_ogata(const HawkesParams& params, const SdeSpec& spec, double horizon, Rng& rng,
                                const SimulationOptions& options) {
    validate_inputs(params, spec, horizon);
    const double a = params.a;
    const double delta = params.delta;
    const double base_excess = std::max(0.0, params.lambda0 - a);

    std::vector<double> times;
    ContagionPath levels;
    double t = 0.0;
    double last_event = 0.0;
    double level = spec.y0;
    std::size_t candidates = 0;
    bool truncated = false;

    const auto history_sum = [&](double at) {
        double sum = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            sum += levels[i] * std::exp(-delta * (at - times[i]));
        }
        return sum;
    };

    while (true) {
        if (times.size() >= options.max_events) {
            truncated = true;
            break;
        }
        // The intensity after t never exceeds this: excitation and any base excess only decay.
        const double bound = a + base_excess * std::exp(-delta * t) + history_sum(t);
        const double next = t + rng.exponential(bound);
        if (next > horizon) {
            break;
        }
        if (!(next > t)) {
            throw NumericalError("simulate_ogata: intensity too large to separate event times at t=" +
                                 std::to_string(t) + " (the process has exploded)");
        }
        t = next;
        ++candidates;
        const double lambda = a + (params.lambda0 - a) * std::exp(-delta * t) + history_sum(t);
        if (rng.uniform() * bound > lambda) {
            continue;
        }
        level = sample_next_level(spec, level, t - last_event, rng);
        times.push_back(t);
        levels.push_back(level);
        last_event = t;
    }
    return finish(std::move(times), std::move(levels), horizon, truncated, candidates, params,
                  options.record_trace);
}

std::vector<IntensitySample> intensity_trace(const EventSequence& events, std::span<const double> y,
                                             const HawkesParams& params, std::size_t uniform_points) {
    check_aligned(events, y);
    const auto times = events.times();
    const double horizon = events.horizon();
    std::vector<IntensitySample> trace;
    trace.reserve(uniform_points + 2 * times.size());

    double excitation = 0.0;  // just after the last processed event
    double last_event = 0.0;
    std::size_t next = 0;
    const auto excitation_at = [&](double t) { return excitation * std::exp(-params.delta * (t - last_event)); };

    for (std::size_t k = 0; k < uniform_points; ++k) {
        const double t = uniform_points == 1
                             ? 0.0
                             : horizon * static_cast<double>(k) / static_cast<double>(uniform_points - 1);
        while (next < times.size() && times[next] < t) {
            const double left = base_intensity(times[next], params) + excitation_at(times[next]);
            trace.push_back({times[next], left});
            trace.push_back({times[next], left + y[next]});
            excitation = excitation_at(times[next]) + y[next];
            last_event = times[next];
            ++next;
        }
        trace.push_back({t, base_intensity(t, params) + excitation_at(t)});
    }
    while (next < times.size()) {
        const double left = base_intensity(times[next], params) + excitation_at(times[next]);
        trace.push_back({times[next], left});
        trace.push_back({times[next], left + y[next]});
        excitation = excitation_at(times[next]) + y[next];
        last_event = times[next];
        ++next;
    }
    return trace;
}

}  // namespace stochhawkes
