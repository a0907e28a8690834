#include "stochhawkes/sde.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <type_traits>

#include "stochhawkes/densities.hpp"

namespace stochhawkes {

namespace {

void require_step_inputs(double y_prev, double dt) {
    if (!(y_prev > 0.0)) {
        throw std::invalid_argument("transition requires a positive previous level");
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("transition requires a positive time step");
    }
}

}  // namespace

double gbm_step(double y_prev, double dt, double mu, double sigma2, double eps) {
    require_step_inputs(y_prev, dt);
    if (!(sigma2 > 0.0)) {
        throw std::invalid_argument("gbm_step: sigma2 must be positive");
    }
    return y_prev * std::exp(mu * dt + std::sqrt(sigma2 * dt) * eps);
}

double gbm_transition_logpdf(double y_prev, double y_next, double dt, double mu, double sigma2) {
    if (!(y_prev > 0.0) || !(y_next > 0.0)) {
        return density::kNegInf;
    }
    return density::normal_log(std::log(y_next / y_prev), mu * dt, sigma2 * dt) - std::log(y_next);
}

LogNormalMoments exp_langevin_log_moments(double y_prev, double dt, double k, double mu, double sigma2) {
    require_step_inputs(y_prev, dt);
    if (!(k > 0.0)) {
        throw std::invalid_argument("exponential Langevin requires k > 0");
    }
    const double phi = std::exp(-k * dt);
    const double one_minus_phi = -std::expm1(-k * dt);
    const double one_minus_phi_sq = -std::expm1(-2.0 * k * dt);
    return {phi * std::log(y_prev) + mu * one_minus_phi, sigma2 * one_minus_phi_sq / (2.0 * k)};
}

double exp_langevin_step(double y_prev, double dt, double k, double mu, double sigma2, double eps) {
    const auto m = exp_langevin_log_moments(y_prev, dt, k, mu, sigma2);
    return std::exp(m.mean + std::sqrt(m.variance) * eps);
}

double exp_langevin_transition_logpdf(double y_prev, double y_next, double dt, double k, double mu,
                                      double sigma2) {
    if (!(y_prev > 0.0) || !(y_next > 0.0)) {
        return density::kNegInf;
    }
    const auto m = exp_langevin_log_moments(y_prev, dt, k, mu, sigma2);
    const double log_next = std::log(y_next);
    return density::normal_log(log_next, m.mean, m.variance) - log_next;
}

double sample_next_level(const SdeSpec& spec, double y_prev, double dt, Rng& rng) {
    return std::visit(
        [&](const auto& law) -> double {
            using Law = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<Law, ConstantLaw>) {
                return law.psi;
            } else if constexpr (std::is_same_v<Law, IidGammaLaw>) {
                return rng.gamma(law.shape, law.rate);
            } else if constexpr (std::is_same_v<Law, GbmLaw>) {
                return gbm_step(y_prev, dt, law.mu, law.sigma2, rng.normal());
            } else {
                return exp_langevin_step(y_prev, dt, law.k, law.mu, law.sigma2, rng.normal());
            }
        },
        spec.law);
}

ContagionPath sample_path(const SdeSpec& spec, std::span<const double> gaps, Rng& rng) {
    spec.validate();
    ContagionPath path(gaps.size());
    double level = spec.y0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        level = sample_next_level(spec, level, gaps[i], rng);
        path[i] = level;
    }
    return path;
}

double transition_logpdf(const SdeSpec& spec, double y_prev, double y_next, double dt) {
    return std::visit(
        [&](const auto& law) -> double {
            using Law = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<Law, ConstantLaw>) {
                return y_next == law.psi ? 0.0 : density::kNegInf;
            } else if constexpr (std::is_same_v<Law, IidGammaLaw>) {
                return density::gamma_log(y_next, law.shape, law.rate);
            } else if constexpr (std::is_same_v<Law, GbmLaw>) {
                return gbm_transition_logpdf(y_prev, y_next, dt, law.mu, law.sigma2);
            } else {
                return exp_langevin_transition_logpdf(y_prev, y_next, dt, law.k, law.mu, law.sigma2);
            }
        },
        spec.law);
}

double path_logpdf(const SdeSpec& spec, std::span<const double> y, std::span<const double> gaps) {
    if (y.size() != gaps.size()) {
        throw std::invalid_argument("path_logpdf: path and gaps differ in length");
    }
    double total = 0.0;
    double previous = spec.y0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        total += transition_logpdf(spec, previous, y[i], gaps[i]);
        previous = y[i];
    }
    return total;
}

}  // namespace stochhawkes
