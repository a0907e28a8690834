#include "stochhawkes/types.hpp"

#include <cmath>
#include <string>
#include <type_traits>

namespace stochhawkes {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw std::invalid_argument(message);
    }
}

}  // namespace

void HawkesParams::validate() const {
    require(positive_finite(a), "HawkesParams: a must be positive and finite");
    require(positive_finite(lambda0), "HawkesParams: lambda0 must be positive and finite");
    require(positive_finite(delta), "HawkesParams: delta must be positive and finite");
}

EventSequence::EventSequence(std::vector<double> times, double horizon)
    : times_(std::move(times)), horizon_(horizon) {
    require(std::isfinite(horizon_) && horizon_ >= 0.0,
            "EventSequence: horizon must be finite and non-negative");
    double previous = 0.0;
    for (std::size_t i = 0; i < times_.size(); ++i) {
        const double t = times_[i];
        require(std::isfinite(t), "EventSequence: event time " + std::to_string(i) + " is not finite");
        require(t > previous, "EventSequence: event times must be strictly increasing and positive (index " +
                                  std::to_string(i) + ")");
        require(t <= horizon_, "EventSequence: event time " + std::to_string(i) + " exceeds the horizon");
        previous = t;
    }
}

std::vector<double> EventSequence::gaps() const {
    std::vector<double> out(times_.size());
    double previous = 0.0;
    for (std::size_t i = 0; i < times_.size(); ++i) {
        out[i] = times_[i] - previous;
        previous = times_[i];
    }
    return out;
}

void BranchingStructure::validate() const {
    for (std::size_t i = 0; i < parent.size(); ++i) {
        require(parent[i] <= i, "BranchingStructure: event " + std::to_string(i) +
                                    " references a parent that is not earlier");
    }
}

std::vector<std::size_t> BranchingStructure::offspring_counts() const {
    std::vector<std::size_t> counts(parent.size(), 0);
    for (std::size_t slot : parent) {
        if (slot != kImmigrant) {
            ++counts[slot - 1];
        }
    }
    return counts;
}

std::size_t BranchingStructure::immigrant_count() const {
    std::size_t count = 0;
    for (std::size_t slot : parent) {
        count += slot == kImmigrant ? 1 : 0;
    }
    return count;
}

BranchingStructure BranchingStructure::all_immigrants(std::size_t n) {
    return BranchingStructure{std::vector<std::size_t>(n, kImmigrant)};
}

std::string_view to_string(SdeKind kind) {
    switch (kind) {
        case SdeKind::constant: return "constant";
        case SdeKind::iid_gamma: return "gamma";
        case SdeKind::gbm: return "gbm";
        case SdeKind::exp_langevin: return "langevin";
    }
    return "unknown";
}

SdeKind parse_sde_kind(std::string_view name) {
    if (name == "constant") return SdeKind::constant;
    if (name == "gamma" || name == "iid-gamma" || name == "iid_gamma") return SdeKind::iid_gamma;
    if (name == "gbm") return SdeKind::gbm;
    if (name == "langevin" || name == "exp-langevin" || name == "exp_langevin") return SdeKind::exp_langevin;
    throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

void SdeSpec::validate() const {
    require(positive_finite(y0), "SdeSpec: y0 must be positive");
    std::visit(
        [](const auto& law) {
            using Law = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<Law, ConstantLaw>) {
                require(std::isfinite(law.psi) && law.psi >= 0.0, "SdeSpec: psi must be non-negative");
            } else if constexpr (std::is_same_v<Law, IidGammaLaw>) {
                require(positive_finite(law.shape), "SdeSpec: tau must be positive");
                require(positive_finite(law.rate), "SdeSpec: omega must be positive");
            } else if constexpr (std::is_same_v<Law, GbmLaw>) {
                require(std::isfinite(law.mu), "SdeSpec: mu must be finite");
                require(positive_finite(law.sigma2), "SdeSpec: sigma2 must be positive");
            } else {
                require(positive_finite(law.k), "SdeSpec: k must be positive");
                require(std::isfinite(law.mu), "SdeSpec: mu must be finite");
                require(positive_finite(law.sigma2), "SdeSpec: sigma2 must be positive");
            }
        },
        law);
}

std::vector<std::string> law_parameter_names(SdeKind kind) {
    switch (kind) {
        case SdeKind::constant: return {"psi"};
        case SdeKind::iid_gamma: return {"tau", "omega"};
        case SdeKind::gbm: return {"mu", "sigma2"};
        case SdeKind::exp_langevin: return {"k", "mu", "sigma2"};
    }
    return {};
}

std::vector<double> law_parameter_values(const SdeSpec& spec) {
    return std::visit(
        [](const auto& law) -> std::vector<double> {
            using Law = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<Law, ConstantLaw>) {
                return {law.psi};
            } else if constexpr (std::is_same_v<Law, IidGammaLaw>) {
                return {law.shape, law.rate};
            } else if constexpr (std::is_same_v<Law, GbmLaw>) {
                return {law.mu, law.sigma2};
            } else {
                return {law.k, law.mu, law.sigma2};
            }
        },
        spec.law);
}

void check_aligned(const EventSequence& events, std::span<const double> y) {
    if (events.size() != y.size()) {
        throw std::invalid_argument("contagion path length " + std::to_string(y.size()) +
                                    " does not match event count " + std::to_string(events.size()));
    }
}

}  // namespace stochhawkes
