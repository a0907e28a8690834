#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace stochhawkes {

/// Raised when a posterior or likelihood evaluation turns non-finite inside the sampler.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by diagnostics that need more data than they were given.
class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Base intensity a + (lambda0 - a) e^{-delta t} and the shared kernel decay delta.
struct HawkesParams {
    double a{1.0};
    double lambda0{1.0};
    double delta{1.0};

    void validate() const;
};

/// Event times 0 < T_1 < ... < T_n <= horizon.
class EventSequence {
public:
    EventSequence() = default;
    EventSequence(std::vector<double> times, double horizon);

    std::span<const double> times() const noexcept { return times_; }
    double horizon() const noexcept { return horizon_; }
    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }
    double operator[](std::size_t i) const { return times_[i]; }

    /// Inter-event gaps T_i - T_{i-1} with T_0 = 0.
    std::vector<double> gaps() const;

private:
    std::vector<double> times_;
    double horizon_{0.0};
};

/// Excitation levels Y_1..Y_n, index-aligned with the events.
using ContagionPath = std::vector<double>;

/// Parent slot per event. Slot 0 marks an immigrant; slot j >= 1 means the event is
/// an offspring of the event at zero-based index j - 1. Event i may only use slots 0..i.
struct BranchingStructure {
    static constexpr std::size_t kImmigrant = 0;

    std::vector<std::size_t> parent;

    std::size_t size() const noexcept { return parent.size(); }
    void validate() const;
    /// Number of direct offspring of every event.
    std::vector<std::size_t> offspring_counts() const;
    std::size_t immigrant_count() const;

    static BranchingStructure all_immigrants(std::size_t n);
};

enum class SdeKind { constant, iid_gamma, gbm, exp_langevin };

std::string_view to_string(SdeKind kind);
/// Accepts "constant", "gamma"/"iid-gamma", "gbm", "langevin"/"exp-langevin".
SdeKind parse_sde_kind(std::string_view name);

struct ConstantLaw {
    double psi{0.0};
};

/// Shape-rate parameterization: density proportional to y^{shape-1} e^{-rate y}.
struct IidGammaLaw {
    double shape{1.0};  // tau
    double rate{1.0};   // omega
};

/// d log Y = mu dt + sigma dB.
struct GbmLaw {
    double mu{0.0};
    double sigma2{1.0};
};

/// log Y is an Ornstein-Uhlenbeck process reverting to mu at rate k.
struct ExpLangevinLaw {
    double k{1.0};
    double mu{0.0};
    double sigma2{1.0};
};

using ExcitationLaw = std::variant<ConstantLaw, IidGammaLaw, GbmLaw, ExpLangevinLaw>;

struct SdeSpec {
    ExcitationLaw law{ConstantLaw{}};
    double y0{1.0};

    SdeKind kind() const noexcept { return static_cast<SdeKind>(law.index()); }
    void validate() const;

    static SdeSpec constant(double psi) { return {ConstantLaw{psi}, 1.0}; }
    static SdeSpec iid_gamma(double shape, double rate) { return {IidGammaLaw{shape, rate}, 1.0}; }
    static SdeSpec gbm(double mu, double sigma2, double y0) { return {GbmLaw{mu, sigma2}, y0}; }
    static SdeSpec exp_langevin(double k, double mu, double sigma2, double y0) {
        return {ExpLangevinLaw{k, mu, sigma2}, y0};
    }
};

/// Names of the law parameters of a kind, in the order used by chain files.
std::vector<std::string> law_parameter_names(SdeKind kind);
std::vector<double> law_parameter_values(const SdeSpec& spec);

void check_aligned(const EventSequence& events, std::span<const double> y);

}  // namespace stochhawkes
