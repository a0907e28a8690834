#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "stochhawkes/densities.hpp"
#include "stochhawkes/infer.hpp"
#include "stochhawkes/model.hpp"
#include "stochhawkes/sde.hpp"

namespace stochhawkes {

namespace {

void require_same_length(std::size_t lhs, std::size_t rhs, const char* what) {
    if (lhs != rhs) {
        throw std::invalid_argument(std::string(what) + ": inputs differ in length");
    }
}

// (1 - e^{-delta (T - T_i)}) / delta: the mass event i's kernel puts inside the window.
double exposure(double horizon, double t_i, double delta) { return -std::expm1(-delta * (horizon - t_i)) / delta; }

}  // namespace

void Hyperparams::validate() const {
    const auto gamma_ok = [](const GammaPrior& p) { return p.shape > 0.0 && p.rate > 0.0; };
    if (!gamma_ok(a) || !gamma_ok(lambda0) || !gamma_ok(delta) || !gamma_ok(tau) || !gamma_ok(omega) ||
        !gamma_ok(psi)) {
        throw std::invalid_argument("Hyperparams: gamma prior shapes and rates must be positive");
    }
    if (!(mu.variance > 0.0) || !(k.variance > 0.0)) {
        throw std::invalid_argument("Hyperparams: normal prior variances must be positive");
    }
    if (!(sigma2.shape > 0.0) || !(sigma2.scale > 0.0)) {
        throw std::invalid_argument("Hyperparams: inverse-gamma prior must have positive shape and scale");
    }
    if (!(y0 > 0.0) || !std::isfinite(y0)) {
        throw std::invalid_argument("Hyperparams: y0 must be positive");
    }
}

std::vector<double> branching_probabilities(std::size_t i, const EventSequence& events,
                                            std::span<const double> y, const HawkesParams& params) {
    check_aligned(events, y);
    if (i >= events.size()) {
        throw std::out_of_range("branching_probabilities: event index " + std::to_string(i) + " out of range");
    }
    const auto times = events.times();
    std::vector<double> probs(i + 1);
    probs[0] = base_intensity(times[i], params);
    double total = probs[0];
    for (std::size_t j = 0; j < i; ++j) {
        probs[j + 1] = y[j] * std::exp(-params.delta * (times[i] - times[j]));
        total += probs[j + 1];
    }
    for (double& p : probs) {
        p /= total;
    }
    return probs;
}

BranchingStructure gibbs_sample_z(const EventSequence& events, std::span<const double> y,
                                  const HawkesParams& params, Rng& rng) {
    check_aligned(events, y);
    const auto times = events.times();
    const std::size_t n = times.size();
    BranchingStructure z{std::vector<std::size_t>(n, BranchingStructure::kImmigrant)};
    std::vector<double> gap_decay(n);
    double previous = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        gap_decay[i] = std::exp(-params.delta * (times[i] - previous));
        previous = times[i];
    }

    // excitation = sum_{j<i} Y_j e^{-delta (T_i - T_j)}, carried forward in O(1) per event.
    // The draw then scans the immigrant slot and the parents from the most recent back,
    // which stops after a few candidates for any kernel with short effective memory.
    double excitation = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) excitation = (excitation + y[i - 1]) * gap_decay[i];
        const double base = base_intensity(times[i], params);
        const double target = rng.uniform() * (base + excitation);
        double cumulative = base;
        if (target < cumulative) continue;
        double decay = 1.0;
        std::size_t chosen = BranchingStructure::kImmigrant;
        for (std::size_t j = i; j-- > 0;) {
            decay *= gap_decay[j + 1];
            const double w = y[j] * decay;
            if (w > 0.0) chosen = j + 1;  // rounding fallback: the last slot with mass
            cumulative += w;
            if (target < cumulative || decay == 0.0) break;
        }
        z.parent[i] = chosen;
    }
    return z;
}

std::vector<double> log_increments(std::span<const double> y, double y0) {
    std::vector<double> x(y.size());
    double previous = y0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        x[i] = std::log(y[i] / previous);
        previous = y[i];
    }
    return x;
}

NormalPosterior gbm_mu_posterior(std::span<const double> x, std::span<const double> gaps, double sigma2,
                                 const NormalPrior& prior) {
    require_same_length(x.size(), gaps.size(), "gbm_mu_posterior");
    double sum_x = 0.0;
    double sum_gap = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum_x += x[i];
        sum_gap += gaps[i];
    }
    const double mean = (prior.variance * sum_x + prior.mean * sigma2) / (prior.variance * sum_gap + sigma2);
    const double variance = 1.0 / (sum_gap / sigma2 + 1.0 / prior.variance);
    return {mean, variance};
}

double gibbs_gbm_mu(std::span<const double> x, std::span<const double> gaps, double sigma2,
                    const NormalPrior& prior, Rng& rng) {
    const auto post = gbm_mu_posterior(x, gaps, sigma2, prior);
    return rng.normal(post.mean, std::sqrt(post.variance));
}

InverseGammaPosterior gbm_sigma2_posterior(std::span<const double> x, std::span<const double> gaps, double mu,
                                           const InverseGammaPrior& prior) {
    require_same_length(x.size(), gaps.size(), "gbm_sigma2_posterior");
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = x[i] - mu * gaps[i];
        ss += r * r / gaps[i];
    }
    return {prior.shape + 0.5 * static_cast<double>(x.size()), prior.scale + 0.5 * ss};
}

double gibbs_gbm_sigma2(std::span<const double> x, std::span<const double> gaps, double mu,
                        const InverseGammaPrior& prior, Rng& rng) {
    const auto post = gbm_sigma2_posterior(x, gaps, mu, prior);
    return rng.inverse_gamma(post.shape, post.scale);
}

NormalPosterior langevin_mu_posterior(std::span<const double> y, double y0, std::span<const double> gaps,
                                      double k, double sigma2, const NormalPrior& prior) {
    require_same_length(y.size(), gaps.size(), "langevin_mu_posterior");
    double weighted = 0.0;  // sum (log Y_i - phi_i log Y_{i-1}) xi_i
    double precision = 0.0; // sum xi_i phi_i^-
    double log_prev = std::log(y0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double phi = std::exp(-k * gaps[i]);
        const double phi_minus = -std::expm1(-k * gaps[i]);
        const double xi = 2.0 * k / (1.0 + phi);
        const double log_y = std::log(y[i]);
        weighted += (log_y - phi * log_prev) * xi;
        precision += xi * phi_minus;
        log_prev = log_y;
    }
    const double mean = (prior.variance * weighted + prior.mean * sigma2) / (prior.variance * precision + sigma2);
    const double variance = 1.0 / (precision / sigma2 + 1.0 / prior.variance);
    return {mean, variance};
}

double gibbs_langevin_mu(std::span<const double> y, double y0, std::span<const double> gaps, double k,
                         double sigma2, const NormalPrior& prior, Rng& rng) {
    const auto post = langevin_mu_posterior(y, y0, gaps, k, sigma2, prior);
    return rng.normal(post.mean, std::sqrt(post.variance));
}

InverseGammaPosterior langevin_sigma2_posterior(std::span<const double> y, double y0,
                                                std::span<const double> gaps, double k, double mu,
                                                const InverseGammaPrior& prior) {
    require_same_length(y.size(), gaps.size(), "langevin_sigma2_posterior");
    double ss = 0.0;
    double log_prev = std::log(y0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double phi = std::exp(-k * gaps[i]);
        const double phi_minus = -std::expm1(-k * gaps[i]);
        const double phi_plus = 1.0 + phi;
        const double log_y = std::log(y[i]);
        const double r = log_y - phi * log_prev - mu * phi_minus;
        ss += k * r * r / (phi_minus * phi_plus);
        log_prev = log_y;
    }
    return {prior.shape + 0.5 * static_cast<double>(y.size()), prior.scale + ss};
}

double gibbs_langevin_sigma2(std::span<const double> y, double y0, std::span<const double> gaps, double k,
                             double mu, const InverseGammaPrior& prior, Rng& rng) {
    const auto post = langevin_sigma2_posterior(y, y0, gaps, k, mu, prior);
    return rng.inverse_gamma(post.shape, post.scale);
}

std::optional<NormalPosterior> langevin_k_linearized_posterior(std::span<const double> y, double y0,
                                                               std::span<const double> gaps, double mu,
                                                               double sigma2, const NormalPrior& prior) {
    require_same_length(y.size(), gaps.size(), "langevin_k_linearized_posterior");
    double lag_sum = 0.0;        // sum (log Y_{i-1} - mu)
    double weighted_sq = 0.0;    // sum Delta_i (log Y_i - mu)^2
    double weighted = 0.0;       // sum Delta_i (log Y_i - mu)
    double log_prev = std::log(y0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double log_y = std::log(y[i]);
        lag_sum += log_prev - mu;
        weighted_sq += gaps[i] * (log_y - mu) * (log_y - mu);
        weighted += gaps[i] * (log_y - mu);
        log_prev = log_y;
    }
    const double mean = (prior.variance * lag_sum + sigma2 * prior.mean) / (prior.variance * weighted_sq + sigma2);
    const double precision = weighted / sigma2 + 1.0 / prior.variance;
    if (!(precision > 0.0) || !std::isfinite(mean)) {
        return std::nullopt;
    }
    return NormalPosterior{mean, 1.0 / precision};
}

double gibbs_langevin_k(std::span<const double> y, double y0, std::span<const double> gaps, double mu,
                        double sigma2, const NormalPrior& prior, double current_k, Rng& rng, int max_retries) {
    const auto post = langevin_k_linearized_posterior(y, y0, gaps, mu, sigma2, prior);
    if (!post) {
        return current_k;
    }
    const double sd = std::sqrt(post->variance);
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        const double k = rng.normal(post->mean, sd);
        if (k > 0.0) {
            return k;
        }
    }
    return current_k;
}

GammaPosterior gamma_y_posterior(std::size_t i, const EventSequence& events, std::size_t offspring,
                                 double delta, double tau, double omega) {
    if (i >= events.size()) {
        throw std::out_of_range("gamma_y_posterior: event index out of range");
    }
    return {tau + static_cast<double>(offspring), omega + exposure(events.horizon(), events[i], delta)};
}

double gibbs_gamma_y(std::size_t i, const EventSequence& events, const BranchingStructure& z,
                     const HawkesParams& params, double tau, double omega, Rng& rng) {
    std::size_t offspring = 0;
    for (std::size_t r = i + 1; r < z.size(); ++r) {
        offspring += z.parent[r] == i + 1 ? 1 : 0;
    }
    const auto post = gamma_y_posterior(i, events, offspring, params.delta, tau, omega);
    return rng.gamma(post.shape, post.rate);
}

GammaPosterior gamma_omega_posterior(std::span<const double> y, double tau, const GammaPrior& prior) {
    double sum = 0.0;
    for (double v : y) {
        sum += v;
    }
    return {prior.shape + tau * static_cast<double>(y.size()), prior.rate + sum};
}

double gibbs_gamma_omega(std::span<const double> y, double tau, const GammaPrior& prior, Rng& rng) {
    const auto post = gamma_omega_posterior(y, tau, prior);
    return rng.gamma(post.shape, post.rate);
}

double mh_log_accept_tau(double tau_new, double tau, double omega, std::span<const double> y,
                         const GammaPrior& prior) {
    if (!(tau_new > 0.0)) {
        return density::kNegInf;
    }
    const double n = static_cast<double>(y.size());
    double sum_log_y = 0.0;
    for (double v : y) {
        sum_log_y += std::log(v);
    }
    return (tau_new - tau) * (n * std::log(omega) + sum_log_y) + (prior.shape - 1.0) * std::log(tau_new / tau) -
           n * (std::lgamma(tau_new) - std::lgamma(tau)) - (tau_new - tau) * prior.rate;
}

GammaPosterior constant_psi_posterior(const EventSequence& events, const BranchingStructure& z, double delta,
                                      const GammaPrior& prior) {
    require_same_length(events.size(), z.size(), "constant_psi_posterior");
    double total_exposure = 0.0;
    for (double t : events.times()) {
        total_exposure += exposure(events.horizon(), t, delta);
    }
    const double offspring = static_cast<double>(z.size() - z.immigrant_count());
    return {prior.shape + offspring, prior.rate + total_exposure};
}

double mh_log_accept_y_gbm(std::size_t i, double y_new, const EventSequence& events, std::span<const double> y,
                           std::span<const std::size_t> offspring, const HawkesParams& params, const GbmLaw& law,
                           double y0) {
    check_aligned(events, y);
    if (i >= y.size()) {
        throw std::out_of_range("mh_log_accept_y_gbm: event index out of range");
    }
    if (!(y_new > 0.0)) {
        return density::kNegInf;
    }
    const auto times = events.times();
    const double y_old = y[i];
    double log_ratio = -(y_new - y_old) * exposure(events.horizon(), times[i], params.delta);

    const double y_prev = i == 0 ? y0 : y[i - 1];
    const double gap_in = times[i] - (i == 0 ? 0.0 : times[i - 1]);
    const auto backward = [&](double v) {
        const double r = std::log(v / y_prev) - law.mu * gap_in;
        return r * r;
    };
    log_ratio -= (backward(y_new) - backward(y_old)) / (2.0 * law.sigma2 * gap_in);

    if (i + 1 < y.size()) {
        const double gap_out = times[i + 1] - times[i];
        const auto forward = [&](double v) {
            const double r = std::log(y[i + 1] / v) - law.mu * gap_out;
            return r * r;
        };
        log_ratio -= (forward(y_new) - forward(y_old)) / (2.0 * law.sigma2 * gap_out);
    }

    const double children = i < offspring.size() ? static_cast<double>(offspring[i]) : 0.0;
    log_ratio += (children - 1.0) * std::log(y_new / y_old);
    return log_ratio;
}

double mh_log_accept_a(double a_new, const EventSequence& events, const BranchingStructure& z,
                       const HawkesParams& params, const GammaPrior& prior) {
    if (!(a_new > 0.0)) {
        return density::kNegInf;
    }
    require_same_length(events.size(), z.size(), "mh_log_accept_a");
    const auto times = events.times();
    double log_ratio = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (z.parent[i] != BranchingStructure::kImmigrant) {
            continue;
        }
        const double decay = std::exp(-params.delta * times[i]);
        const double proposed = a_new + (params.lambda0 - a_new) * decay;
        if (!(proposed > 0.0)) {
            return density::kNegInf;
        }
        log_ratio += std::log(proposed / (params.a + (params.lambda0 - params.a) * decay));
    }
    const double horizon = events.horizon();
    log_ratio += (prior.shape - 1.0) * std::log(a_new / params.a);
    log_ratio += (a_new - params.a) * (-std::expm1(-params.delta * horizon) / params.delta - horizon - prior.rate);
    return log_ratio;
}

double log_posterior(const EventSequence& events, const ChainState& state, const Hyperparams& hyper) {
    const auto& p = state.params;
    double total = log_likelihood(events, state.z, state.y, p);
    total += density::gamma_log(p.a, hyper.a.shape, hyper.a.rate);
    total += density::gamma_log(p.lambda0, hyper.lambda0.shape, hyper.lambda0.rate);
    total += density::gamma_log(p.delta, hyper.delta.shape, hyper.delta.rate);
    const auto gaps = events.gaps();
    total += path_logpdf(state.spec, state.y, gaps);
    total += std::visit(
        [&](const auto& law) -> double {
            using Law = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<Law, ConstantLaw>) {
                return density::gamma_log(law.psi, hyper.psi.shape, hyper.psi.rate);
            } else if constexpr (std::is_same_v<Law, IidGammaLaw>) {
                return density::gamma_log(law.shape, hyper.tau.shape, hyper.tau.rate) +
                       density::gamma_log(law.rate, hyper.omega.shape, hyper.omega.rate);
            } else if constexpr (std::is_same_v<Law, GbmLaw>) {
                return density::normal_log(law.mu, hyper.mu.mean, hyper.mu.variance) +
                       density::inverse_gamma_log(law.sigma2, hyper.sigma2.shape, hyper.sigma2.scale);
            } else {
                // The k prior is truncated to k > 0; the truncation constant cancels.
                if (!(law.k > 0.0)) return density::kNegInf;
                return density::normal_log(law.k, hyper.k.mean, hyper.k.variance) +
                       density::normal_log(law.mu, hyper.mu.mean, hyper.mu.variance) +
                       density::inverse_gamma_log(law.sigma2, hyper.sigma2.shape, hyper.sigma2.scale);
            }
        },
        state.spec.law);
    return total;
}

double y_level_log_ratio(std::size_t i, double y_new, const EventSequence& events, std::span<const double> y,
                         std::span<const std::size_t> offspring, const HawkesParams& params, const SdeSpec& spec) {
    check_aligned(events, y);
    if (i >= y.size()) {
        throw std::out_of_range("y_level_log_ratio: event index out of range");
    }
    if (!(y_new > 0.0)) {
        return density::kNegInf;
    }
    const auto times = events.times();
    const double y_old = y[i];
    const double children = i < offspring.size() ? static_cast<double>(offspring[i]) : 0.0;
    double log_ratio = children * std::log(y_new / y_old) -
                       (y_new - y_old) * exposure(events.horizon(), times[i], params.delta);

    const double y_prev = i == 0 ? spec.y0 : y[i - 1];
    const double gap_in = times[i] - (i == 0 ? 0.0 : times[i - 1]);
    log_ratio += transition_logpdf(spec, y_prev, y_new, gap_in) - transition_logpdf(spec, y_prev, y_old, gap_in);
    if (i + 1 < y.size()) {
        const double gap_out = times[i + 1] - times[i];
        log_ratio += transition_logpdf(spec, y_new, y[i + 1], gap_out) -
                     transition_logpdf(spec, y_old, y[i + 1], gap_out);
    }
    return log_ratio;
}

double mh_log_accept_generic(GenericBlock block, double proposed, const EventSequence& events,
                             const ChainState& state, const Hyperparams& hyper, std::size_t index) {
    const auto& p = state.params;
    switch (block) {
        case GenericBlock::lambda0: {
            if (!(proposed > 0.0)) return density::kNegInf;
            HawkesParams moved = p;
            moved.lambda0 = proposed;
            return log_likelihood(events, state.z, state.y, moved) - log_likelihood(events, state.z, state.y, p) +
                   density::gamma_log(proposed, hyper.lambda0.shape, hyper.lambda0.rate) -
                   density::gamma_log(p.lambda0, hyper.lambda0.shape, hyper.lambda0.rate);
        }
        case GenericBlock::delta: {
            if (!(proposed > 0.0)) return density::kNegInf;
            HawkesParams moved = p;
            moved.delta = proposed;
            return log_likelihood(events, state.z, state.y, moved) - log_likelihood(events, state.z, state.y, p) +
                   density::gamma_log(proposed, hyper.delta.shape, hyper.delta.rate) -
                   density::gamma_log(p.delta, hyper.delta.shape, hyper.delta.rate);
        }
        case GenericBlock::y_level: {
            const auto offspring = state.z.offspring_counts();
            return y_level_log_ratio(index, proposed, events, state.y, offspring, p, state.spec);
        }
        case GenericBlock::k: {
            const auto* law = std::get_if<ExpLangevinLaw>(&state.spec.law);
            if (law == nullptr) {
                throw std::invalid_argument("mh_log_accept_generic: k block needs exponential Langevin contagion");
            }
            if (!(proposed > 0.0)) return density::kNegInf;
            SdeSpec moved = state.spec;
            std::get<ExpLangevinLaw>(moved.law).k = proposed;
            const auto gaps = events.gaps();
            return path_logpdf(moved, state.y, gaps) - path_logpdf(state.spec, state.y, gaps) +
                   density::normal_log(proposed, hyper.k.mean, hyper.k.variance) -
                   density::normal_log(law->k, hyper.k.mean, hyper.k.variance);
        }
    }
    throw std::invalid_argument("mh_log_accept_generic: unknown block");
}

}  // namespace stochhawkes
