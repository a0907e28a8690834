#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stochhawkes/infer.hpp"
#include "stochhawkes/types.hpp"

namespace stochhawkes {

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov tests

struct KsResult {
    double statistic{0.0};
    double p_value{1.0};
    std::size_t n{0};
};

/// Asymptotic Kolmogorov survival function P(K > x).
double kolmogorov_survival(double x);

/// One-sample test against the unit exponential, with Stephens' small-sample correction.
KsResult ks_test_exponential(std::vector<double> values);

/// Two-sample test; p-value from the asymptotic law at n1 n2 / (n1 + n2).
KsResult ks_test_two_sample(std::vector<double> x, std::vector<double> y);

/// Rescaled gaps Lambda(T_i) - Lambda(T_{i-1}).
std::vector<double> rescaled_gaps(const EventSequence& events, std::span<const double> y, const HawkesParams& params);

/// KS test of the rescaled gaps against Exp(1). Throws InsufficientData below 50 events.
KsResult time_rescaling_test(const EventSequence& events, std::span<const double> y, const HawkesParams& params);

// ---------------------------------------------------------------------------
// Renewal equation for E[lambda_t]

using MeanExcitation = std::function<double(double)>;

/// t -> E[Y_t] in closed form for each contagion law.
MeanExcitation mean_excitation(const SdeSpec& spec);

/// Solves m' = delta (a - m) + E[Y_t] m, m(0) = lambda0, i.e. the renewal equation with
/// E[Y_s lambda_s] replaced by E[Y_s] E[lambda_s]. RK4 on a refined grid: the step count
/// is doubled until successive solutions differ by less than 1e-8 in sup norm (relative to
/// max(1, |m|)), capped at 2^20 steps. `grid` must be non-negative and strictly increasing.
std::vector<double> expected_intensity_curve(const HawkesParams& params, const MeanExcitation& mean_y,
                                             std::span<const double> grid);

// ---------------------------------------------------------------------------
// Chain summaries

/// Geyer initial-positive-sequence effective sample size. Returns 1 for a constant series.
double effective_sample_size(std::span<const double> draws);

/// Split R-hat over one or more equal-length chains.
double split_rhat(const std::vector<std::vector<double>>& chains);

double quantile(std::vector<double> values, double p);

struct ParameterSummary {
    std::string name;
    double mean{0.0};
    double median{0.0};
    double q05{0.0};
    double q95{0.0};
    double sd{0.0};
    double ess{0.0};
    double rhat{1.0};
    bool degenerate{false};  // no variation across draws
};

std::vector<ParameterSummary> chain_summary(const std::vector<Chain>& chains);
std::vector<ParameterSummary> chain_summary(const Chain& chain);

// ---------------------------------------------------------------------------
// Joint-distribution (Geweke) sampler test

struct GewekeConfig {
    std::size_t rounds{20000};
    double horizon{6.0};
    std::size_t sweeps_per_round{5};
    std::uint64_t seed{1};
    ProposalScales proposal{0.3, 0.3, 0.3, 0.5, 0.3, 0.2, 0.2, 0.2};
    Mutation mutation{Mutation::none};
    KUpdate k_update{KUpdate::exact_mh};
    /// Hard cap on simulated events per dataset; reaching it is reported as an error.
    std::size_t max_events{2000};
};

/// Priors concentrated enough that simulated datasets stay small (about 10 events at the
/// default horizon) and subcritical.
Hyperparams geweke_hyperparams();

struct GewekeMoment {
    std::string parameter;
    int moment{1};
    double prior_mean{0.0};    // marginal-conditional estimate
    double sampler_mean{0.0};  // successive-conditional estimate
    double z{0.0};
};

/// Compares prior draws with draws from alternating sampler sweeps and data re-simulation.
/// Throws InsufficientData for zero rounds and NumericalError on non-finite moments.
std::vector<GewekeMoment> geweke_joint_test(SdeKind kind, const Hyperparams& hyper, const GewekeConfig& config);

}  // namespace stochhawkes
