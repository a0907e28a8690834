#include "stochhawkes/em.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "stochhawkes/model.hpp"

namespace stochhawkes {

namespace {

void check_shape(const EventSequence& events, const Responsibilities& r) {
    if (r.size() != events.size()) {
        throw std::invalid_argument("responsibilities: one row per event required");
    }
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i].size() != i + 1) {
            throw std::invalid_argument("responsibilities: row " + std::to_string(i) + " must have " +
                                        std::to_string(i + 1) + " entries");
        }
    }
}

}  // namespace

Responsibilities em_responsibilities(const EventSequence& events, const HawkesParams& params, double psi) {
    if (!(psi >= 0.0) || !std::isfinite(psi)) {
        throw std::invalid_argument("em_responsibilities: psi must be non-negative");
    }
    params.validate();
    const auto times = events.times();
    Responsibilities r(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        auto& row = r[i];
        row.resize(i + 1);
        const double base = base_intensity(times[i], params);
        double total = base;
        for (std::size_t j = 0; j < i; ++j) {
            row[j] = psi * std::exp(-params.delta * (times[i] - times[j]));
            total += row[j];
        }
        row[i] = base;
        for (double& v : row) {
            v /= total;
        }
    }
    return r;
}

Responsibilities responsibilities_from_branching(const BranchingStructure& z) {
    z.validate();
    Responsibilities r(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        r[i].assign(i + 1, 0.0);
        r[i][z.parent[i] == BranchingStructure::kImmigrant ? i : z.parent[i] - 1] = 1.0;
    }
    return r;
}

double em_q_value(const EventSequence& events, const Responsibilities& r, const HawkesParams& params, double psi) {
    check_shape(events, r);
    if (!(psi >= 0.0)) {
        throw std::invalid_argument("em_q_value: psi must be non-negative");
    }
    const auto times = events.times();
    const double horizon = events.horizon();
    const double delta = params.delta;
    const double log_psi = std::log(psi);
    double q = 0.0;
    double exposure = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto& row = r[i];
        if (row[i] > 0.0) {
            q += row[i] * std::log(base_intensity(times[i], params));
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (row[j] > 0.0) {
                if (psi == 0.0) return -std::numeric_limits<double>::infinity();
                q += row[j] * (log_psi - delta * (times[i] - times[j]));
            }
        }
        exposure += -std::expm1(-delta * (horizon - times[i])) / delta;
    }
    const double base_exposure = params.a * horizon - (params.lambda0 - params.a) * std::expm1(-delta * horizon) / delta;
    return q - psi * exposure - base_exposure;
}

double em_update_psi(const EventSequence& events, const Responsibilities& r, double delta) {
    check_shape(events, r);
    const auto times = events.times();
    double offspring = 0.0;
    double exposure = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            offspring += r[i][j];
        }
        exposure += -std::expm1(-delta * (events.horizon() - times[i])) / delta;
    }
    if (!(exposure > 0.0)) {
        throw std::invalid_argument("em_update_psi: no exposure, psi is not identified");
    }
    return offspring / exposure;
}

}  // namespace stochhawkes
