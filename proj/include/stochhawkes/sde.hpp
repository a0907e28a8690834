#pragma once

#include <span>

#include "stochhawkes/random.hpp"
#include "stochhawkes/types.hpp"

namespace stochhawkes {

// Exact transition laws of the excitation process over an arbitrary gap dt.
// GBM:  log Y' = log Y + mu dt + sigma sqrt(dt) eps.
// Exponential Langevin: log Y' = phi log Y + mu (1 - phi) + sqrt(sigma2 (1 - phi^2) / (2k)) eps,
// phi = e^{-k dt}.

double gbm_step(double y_prev, double dt, double mu, double sigma2, double eps);

/// Log-density of Y' given Y (lognormal, including the -log Y' Jacobian). -inf for
/// non-positive levels.
double gbm_transition_logpdf(double y_prev, double y_next, double dt, double mu, double sigma2);

double exp_langevin_step(double y_prev, double dt, double k, double mu, double sigma2, double eps);

double exp_langevin_transition_logpdf(double y_prev, double y_next, double dt, double k, double mu,
                                      double sigma2);

/// Mean and variance of log Y' given log Y under the exponential Langevin law.
struct LogNormalMoments {
    double mean;
    double variance;
};
LogNormalMoments exp_langevin_log_moments(double y_prev, double dt, double k, double mu, double sigma2);

/// Draws the next level of `spec` over a gap of length dt from y_prev.
double sample_next_level(const SdeSpec& spec, double y_prev, double dt, Rng& rng);

/// Y_1..Y_n along the given gaps, starting at spec.y0 for the path laws.
ContagionPath sample_path(const SdeSpec& spec, std::span<const double> gaps, Rng& rng);

/// Log-density of level y_next given y_prev over gap dt under `spec`. For the iid
/// Gamma law y_prev is ignored; for the constant law the density is a point mass
/// (0 when y_next == psi, -inf otherwise).
double transition_logpdf(const SdeSpec& spec, double y_prev, double y_next, double dt);

/// Joint log-density of a whole path: sum of transition_logpdf starting at spec.y0.
double path_logpdf(const SdeSpec& spec, std::span<const double> y, std::span<const double> gaps);

}  // namespace stochhawkes
