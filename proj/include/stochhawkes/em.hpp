#pragma once

#include <vector>

#include "stochhawkes/types.hpp"

namespace stochhawkes {

/// Row-stochastic E-step matrix for the classical Hawkes model with kernel psi e^{-delta t}.
/// Row i has i + 1 entries: entry j < i is the probability that event j is the parent of
/// event i, entry i the probability that event i is an immigrant.
using Responsibilities = std::vector<std::vector<double>>;

Responsibilities em_responsibilities(const EventSequence& events, const HawkesParams& params, double psi);

/// One-hot responsibilities of a fixed branching structure.
Responsibilities responsibilities_from_branching(const BranchingStructure& z);

/// Expected complete-data log-likelihood. Includes the base-rate exposure
/// aT + (lambda0 - a)(1 - e^{-delta T}) / delta, so one-hot responsibilities reproduce
/// log_likelihood at Y = psi.
double em_q_value(const EventSequence& events, const Responsibilities& r, const HawkesParams& params, double psi);

/// Maximizer of em_q_value over psi with everything else held fixed.
double em_update_psi(const EventSequence& events, const Responsibilities& r, double delta);

}  // namespace stochhawkes
