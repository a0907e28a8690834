#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace stochhawkes::density {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double normal_log(double x, double mean, double variance) {
    const double r = x - mean;
    return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + r * r / variance);
}

/// Shape-rate gamma.
inline double gamma_log(double x, double shape, double rate) {
    if (!(x > 0.0)) return kNegInf;
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

/// Inverse gamma with shape alpha and scale beta: density proportional to x^{-alpha-1} e^{-beta/x}.
inline double inverse_gamma_log(double x, double shape, double scale) {
    if (!(x > 0.0)) return kNegInf;
    return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

}  // namespace stochhawkes::density
