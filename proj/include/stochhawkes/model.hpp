#pragma once

#include <span>
#include <vector>

#include "stochhawkes/types.hpp"

namespace stochhawkes {

/// a + (lambda0 - a) e^{-delta t}. Throws std::invalid_argument for t < 0.
double base_intensity(double t, const HawkesParams& params);

/// Conditional intensity at t using only events strictly before t, so at an event
/// time this is the left limit.
double intensity_at(double t, const EventSequence& events, std::span<const double> y,
                    const HawkesParams& params);

/// lambda(T_i-) for every event in O(n) via the exponential-kernel recursion.
std::vector<double> intensity_left_limits(const EventSequence& events, std::span<const double> y,
                                          const HawkesParams& params);

/// Closed-form compensator Lambda_t = int_0^t lambda(v) dv.
double integrated_intensity(double t, const EventSequence& events, std::span<const double> y,
                            const HawkesParams& params);

/// Lambda(T_i) for every event in O(n).
std::vector<double> compensator_at_events(const EventSequence& events, std::span<const double> y,
                                          const HawkesParams& params);

/// log P(T | Z, Y): the complete-data likelihood given a branching structure.
/// Returns -inf when a referenced parent level is not positive.
double log_likelihood(const EventSequence& events, const BranchingStructure& z,
                      std::span<const double> y, const HawkesParams& params);

/// log P(T | Y) = sum_i log lambda(T_i-) - Lambda_T, i.e. the branching structure summed out.
double point_process_log_likelihood(const EventSequence& events, std::span<const double> y,
                                    const HawkesParams& params);

}  // namespace stochhawkes
