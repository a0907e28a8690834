#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>

#include "stochhawkes/densities.hpp"
#include "stochhawkes/infer.hpp"
#include "stochhawkes/model.hpp"
#include "stochhawkes/sde.hpp"

namespace stochhawkes {

namespace {

enum Stream : std::uint64_t { kInit = 1, kZ, kY, kBase, kLaw };

double exposure(double horizon, double t_i, double delta) { return -std::expm1(-delta * (horizon - t_i)) / delta; }

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

double draw_gamma_prior(const GammaPrior& prior, Rng& rng) { return rng.gamma(prior.shape, prior.rate); }

double draw_positive_normal(const NormalPrior& prior, Rng& rng) {
    const double sd = std::sqrt(prior.variance);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        const double v = rng.normal(prior.mean, sd);
        if (v > 0.0) return v;
    }
    throw std::invalid_argument("k prior puts almost no mass on k > 0");
}

double inverse_gamma_mean(const InverseGammaPrior& prior) {
    return prior.shape > 1.0 ? prior.scale / (prior.shape - 1.0) : prior.scale / prior.shape;
}

}  // namespace

PriorDraw draw_from_prior(SdeKind kind, const Hyperparams& hyper, Rng& rng) {
    PriorDraw d;
    d.params = {draw_gamma_prior(hyper.a, rng), draw_gamma_prior(hyper.lambda0, rng), draw_gamma_prior(hyper.delta, rng)};
    switch (kind) {
        case SdeKind::constant:
            d.spec = SdeSpec::constant(draw_gamma_prior(hyper.psi, rng));
            break;
        case SdeKind::iid_gamma: {
            const double tau = draw_gamma_prior(hyper.tau, rng);
            d.spec = SdeSpec::iid_gamma(tau, draw_gamma_prior(hyper.omega, rng));
            break;
        }
        case SdeKind::gbm: {
            const double mu = rng.normal(hyper.mu.mean, std::sqrt(hyper.mu.variance));
            const double sigma2 = rng.inverse_gamma(hyper.sigma2.shape, hyper.sigma2.scale);
            d.spec = SdeSpec::gbm(mu, sigma2, hyper.y0);
            break;
        }
        case SdeKind::exp_langevin: {
            const double k = draw_positive_normal(hyper.k, rng);
            const double mu = rng.normal(hyper.mu.mean, std::sqrt(hyper.mu.variance));
            const double sigma2 = rng.inverse_gamma(hyper.sigma2.shape, hyper.sigma2.scale);
            d.spec = SdeSpec::exp_langevin(k, mu, sigma2, hyper.y0);
            break;
        }
    }
    return d;
}

void McmcConfig::validate() const {
    if (iterations <= burn_in) {
        throw std::invalid_argument("McmcConfig: iterations must exceed burn_in");
    }
    if (thin == 0) {
        throw std::invalid_argument("McmcConfig: thin must be at least 1");
    }
    if (!(target_acceptance > 0.0 && target_acceptance < 1.0)) {
        throw std::invalid_argument("McmcConfig: target_acceptance must lie in (0, 1)");
    }
    if (adapt_interval == 0) {
        throw std::invalid_argument("McmcConfig: adapt_interval must be at least 1");
    }
    if (fixed_proposal) {
        const auto& s = *fixed_proposal;
        for (double v : {s.a, s.lambda0, s.delta, s.tau, s.k, s.y, s.y_block, s.sigma2_path}) {
            if (!positive_finite(v)) {
                throw std::invalid_argument("McmcConfig: proposal scales must be positive");
            }
        }
    }
}

std::vector<std::string> parameter_names(SdeKind kind) {
    std::vector<std::string> names{"a", "lambda0", "delta"};
    for (auto& name : law_parameter_names(kind)) {
        names.push_back(std::move(name));
    }
    return names;
}

std::vector<double> parameter_values(const ChainState& state) {
    std::vector<double> values{state.params.a, state.params.lambda0, state.params.delta};
    for (double v : law_parameter_values(state.spec)) {
        values.push_back(v);
    }
    return values;
}

std::vector<std::string> Chain::parameter_names() const { return stochhawkes::parameter_names(kind); }

std::vector<double> Chain::parameter(std::string_view name) const {
    const auto names = parameter_names();
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw std::invalid_argument("unknown parameter '" + std::string(name) + "' for " +
                                    std::string(to_string(kind)) + " contagion");
    }
    const auto column = static_cast<std::size_t>(it - names.begin());
    std::vector<double> draws;
    draws.reserve(states.size());
    for (const auto& s : states) {
        draws.push_back(parameter_values(s)[column]);
    }
    return draws;
}

void HybridSampler::BlockStats::record(bool accept) {
    ++proposed;
    ++batch_proposed;
    if (accept) {
        ++accepted;
        ++batch_accepted;
    }
}

HybridSampler::HybridSampler(EventSequence events, SdeKind kind, Hyperparams hyper, McmcConfig config)
    : events_(std::move(events)),
      gaps_(events_.gaps()),
      kind_(kind),
      hyper_(hyper),
      config_(std::move(config)),
      init_rng_(Rng::derive_seed(config_.seed, kInit)),
      z_rng_(Rng::derive_seed(config_.seed, kZ)),
      y_rng_(Rng::derive_seed(config_.seed, kY)),
      base_rng_(Rng::derive_seed(config_.seed, kBase)),
      law_rng_(Rng::derive_seed(config_.seed, kLaw)) {
    hyper_.validate();
    config_.validate();
}

void HybridSampler::initialize() {
    const std::size_t n = events_.size();
    ChainState s;
    if (config_.init == InitMode::prior) {
        auto draw = draw_from_prior(kind_, hyper_, init_rng_);
        s.params = draw.params;
        s.spec = draw.spec;
        s.y = sample_path(s.spec, gaps_, init_rng_);
    } else {
        // Half of the observed rate from immigrants, half from excitation: a = lambda0 =
        // n / (2T) and delta = 2 Y, so every level sits at branching ratio 1/2.
        const double rate =
            n == 0 || events_.horizon() <= 0.0 ? 1.0 : static_cast<double>(n) / events_.horizon();
        double level = hyper_.y0;
        switch (kind_) {
            case SdeKind::constant:
                level = hyper_.psi.shape / hyper_.psi.rate;
                s.spec = SdeSpec::constant(level);
                break;
            case SdeKind::iid_gamma: {
                const double tau = hyper_.tau.shape / hyper_.tau.rate;
                const double omega = hyper_.omega.shape / hyper_.omega.rate;
                s.spec = SdeSpec::iid_gamma(tau, omega);
                level = tau / omega;
                break;
            }
            case SdeKind::gbm:
                s.spec = SdeSpec::gbm(hyper_.mu.mean, inverse_gamma_mean(hyper_.sigma2), hyper_.y0);
                break;
            case SdeKind::exp_langevin:
                s.spec = SdeSpec::exp_langevin(std::max(hyper_.k.mean, 0.1), hyper_.mu.mean,
                                               inverse_gamma_mean(hyper_.sigma2), hyper_.y0);
                break;
        }
        s.params = {0.5 * rate, 0.5 * rate, 2.0 * level};
        s.y.assign(n, level);
    }
    s.z = gibbs_sample_z(events_, s.y, s.params, init_rng_);
    set_state(std::move(s));
}

void HybridSampler::set_state(ChainState state) {
    state.params.validate();
    state.spec.validate();
    if (state.spec.kind() != kind_) {
        throw std::invalid_argument("set_state: contagion law does not match the sampler's kind");
    }
    check_aligned(events_, state.y);
    if (state.z.size() != events_.size()) {
        throw std::invalid_argument("set_state: branching structure does not match the events");
    }
    state.z.validate();
    state_ = std::move(state);
    // Starting scales: 10% of the starting values (the y scale is relative to each level).
    a_stats_.scale = 0.1 * state_.params.a;
    lambda0_stats_.scale = 0.1 * state_.params.lambda0;
    delta_stats_.scale = 0.1 * state_.params.delta;
    y_stats_.scale = 0.1;
    if (const auto* g = std::get_if<IidGammaLaw>(&state_.spec.law)) tau_stats_.scale = 0.1 * g->shape;
    if (const auto* l = std::get_if<ExpLangevinLaw>(&state_.spec.law)) k_stats_.scale = 0.1 * l->k;
    if (config_.fixed_proposal) {
        const auto& f = *config_.fixed_proposal;
        a_stats_.scale = f.a;
        lambda0_stats_.scale = f.lambda0;
        delta_stats_.scale = f.delta;
        tau_stats_.scale = f.tau;
        k_stats_.scale = f.k;
        y_stats_.scale = f.y;
    }
    sigma2_path_stats_.scale = config_.fixed_proposal ? config_.fixed_proposal->sigma2_path : 0.1;
    y_block_stats_.clear();
    if (kind_ == SdeKind::gbm || kind_ == SdeKind::exp_langevin) {
        for (std::size_t len = 2; len <= events_.size(); len *= 2) {
            BlockStats stats;
            const double base = config_.fixed_proposal ? config_.fixed_proposal->y_block : 0.5;
            stats.scale = base * std::sqrt(2.0 / static_cast<double>(len));
            y_block_stats_.push_back(stats);
        }
    }
    frozen_ = false;
    y_sd_.clear();
    refresh_offspring();
    log_likelihood_ = log_likelihood(events_, state_.z, state_.y, state_.params);
}

void HybridSampler::refresh_offspring() { offspring_ = state_.z.offspring_counts(); }

bool HybridSampler::accept(double log_ratio, Rng& rng) {
    if (std::isnan(log_ratio)) {
        throw NumericalError("Metropolis-Hastings log-ratio is NaN");
    }
    return log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio;
}

double HybridSampler::y_proposal_sd(std::size_t i) const {
    if (config_.fixed_proposal) return config_.fixed_proposal->y;
    if (frozen_) return y_sd_[i];
    return y_stats_.scale * state_.y[i];
}

void HybridSampler::sweep() {
    if (!frozen_ && iteration_ >= config_.burn_in) {
        freeze_proposals();
    }
    update_z();
    check_state("Z");
    update_y();
    update_y_blocks();
    check_state("Y");
    update_a();
    check_state("a");
    update_lambda0();
    check_state("lambda0");
    update_delta();
    check_state("delta");
    update_law();
    check_state("contagion law");
    ++iteration_;
    if (!config_.fixed_proposal && iteration_ <= config_.burn_in && iteration_ % config_.adapt_interval == 0) {
        adapt();
    }
    log_likelihood_ = log_likelihood(events_, state_.z, state_.y, state_.params);
    if (!std::isfinite(log_likelihood_)) {
        throw NumericalError("log-likelihood is not finite after sweep " + std::to_string(iteration_));
    }
}

void HybridSampler::update_z() {
    if (events_.empty()) return;
    state_.z = gibbs_sample_z(events_, state_.y, state_.params, z_rng_);
    refresh_offspring();
}

void HybridSampler::update_y() {
    const std::size_t n = events_.size();
    if (n == 0) return;
    const auto times = events_.times();
    const double horizon = events_.horizon();
    const double delta = state_.params.delta;
    const bool mutate = config_.mutation == Mutation::flip_y_exposure_sign;

    if (const auto* g = std::get_if<IidGammaLaw>(&state_.spec.law)) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto post = gamma_y_posterior(i, events_, offspring_[i], delta, g->shape, g->rate);
            state_.y[i] = y_rng_.gamma(post.shape, post.rate);
        }
        return;
    }
    if (std::holds_alternative<ConstantLaw>(state_.spec.law)) {
        return;  // levels are tied to psi
    }
    const auto* gbm = std::get_if<GbmLaw>(&state_.spec.law);
    for (std::size_t i = 0; i < n; ++i) {
        const double y_old = state_.y[i];
        const double y_new = y_old + y_proposal_sd(i) * y_rng_.normal();
        double log_ratio = gbm != nullptr
                               ? mh_log_accept_y_gbm(i, y_new, events_, state_.y, offspring_, state_.params, *gbm,
                                                     state_.spec.y0)
                               : y_level_log_ratio(i, y_new, events_, state_.y, offspring_, state_.params,
                                                   state_.spec);
        if (mutate && y_new > 0.0) {
            log_ratio += 2.0 * (y_new - y_old) * exposure(horizon, times[i], delta);
        }
        const bool ok = accept(log_ratio, y_rng_);
        y_stats_.record(ok);
        if (ok) state_.y[i] = y_new;
    }
}

// Multiplies the levels of a run of consecutive events by a common factor e^eps. Runs tile
// the path at every dyadic length with a random offset, so slow drifts of the whole path
// move as fast as single levels.
void HybridSampler::update_y_blocks() {
    const std::size_t n = events_.size();
    if (y_block_stats_.empty()) return;
    const auto times = events_.times();
    const double horizon = events_.horizon();
    const double delta = state_.params.delta;
    const double y0 = state_.spec.y0;
    const double sign = config_.mutation == Mutation::flip_y_exposure_sign ? -1.0 : 1.0;
    std::vector<double> exposures(n);
    for (std::size_t i = 0; i < n; ++i) exposures[i] = exposure(horizon, times[i], delta);

    for (std::size_t level = 0; level < y_block_stats_.size(); ++level) {
        auto& stats = y_block_stats_[level];
        const std::size_t len = std::size_t{2} << level;
        const std::size_t offset = static_cast<std::size_t>(y_rng_.uniform() * static_cast<double>(len)) % len;
        std::size_t lo = 0;
        std::size_t hi = offset == 0 ? std::min(len, n) : offset;
        while (lo < n) {
            const double eps = stats.scale * y_rng_.normal();
            const double factor = std::exp(eps);
            double log_ratio = static_cast<double>(hi - lo) * eps;  // Jacobian of the common scaling
            for (std::size_t m = lo; m < hi; ++m) {
                log_ratio += static_cast<double>(offspring_[m]) * eps -
                             sign * state_.y[m] * (factor - 1.0) * exposures[m];
            }
            const std::size_t last = std::min(hi, n - 1);
            for (std::size_t m = lo; m <= last; ++m) {
                const double prev_old = m == 0 ? y0 : state_.y[m - 1];
                const double prev_new = (m > lo) ? prev_old * factor : prev_old;
                const double next_old = state_.y[m];
                const double next_new = m < hi ? next_old * factor : next_old;
                log_ratio += transition_logpdf(state_.spec, prev_new, next_new, gaps_[m]) -
                             transition_logpdf(state_.spec, prev_old, next_old, gaps_[m]);
            }
            const bool ok = accept(log_ratio, y_rng_);
            stats.record(ok);
            if (ok) {
                for (std::size_t m = lo; m < hi; ++m) state_.y[m] *= factor;
            }
            lo = hi;
            hi = std::min(hi + len, n);
        }
    }
}

void HybridSampler::update_a() {
    const double proposed = state_.params.a + a_stats_.scale * base_rng_.normal();
    const bool ok = accept(mh_log_accept_a(proposed, events_, state_.z, state_.params, hyper_.a), base_rng_);
    a_stats_.record(ok);
    if (ok) state_.params.a = proposed;
}

void HybridSampler::update_lambda0() {
    const double proposed = state_.params.lambda0 + lambda0_stats_.scale * base_rng_.normal();
    const bool ok =
        accept(mh_log_accept_generic(GenericBlock::lambda0, proposed, events_, state_, hyper_), base_rng_);
    lambda0_stats_.record(ok);
    if (ok) state_.params.lambda0 = proposed;
}

void HybridSampler::update_delta() {
    const double proposed = state_.params.delta + delta_stats_.scale * base_rng_.normal();
    const bool ok = accept(mh_log_accept_generic(GenericBlock::delta, proposed, events_, state_, hyper_), base_rng_);
    delta_stats_.record(ok);
    if (ok) state_.params.delta = proposed;
}

void HybridSampler::update_tau(IidGammaLaw& law) {
    const double proposed = law.shape + tau_stats_.scale * law_rng_.normal();
    const bool ok = accept(mh_log_accept_tau(proposed, law.shape, law.rate, state_.y, hyper_.tau), law_rng_);
    tau_stats_.record(ok);
    if (ok) law.shape = proposed;
}

void HybridSampler::update_k_exact(ExpLangevinLaw& law) {
    const double proposed = law.k + k_stats_.scale * law_rng_.normal();
    const bool ok = accept(mh_log_accept_generic(GenericBlock::k, proposed, events_, state_, hyper_), law_rng_);
    k_stats_.record(ok);
    if (ok) law.k = proposed;
}

// Rescales sigma2 by e^eps and, with it, the deviations of log Y from its drift line by
// e^(eps/2). The standardized increments stay fixed, so their Gaussian factor cancels against
// the Jacobian; what remains is the prior on sigma2, its log-scale Jacobian and the likelihood.
void HybridSampler::update_gbm_volatility_path(GbmLaw& law) {
    const std::size_t n = events_.size();
    if (n == 0) return;
    const auto times = events_.times();
    const double horizon = events_.horizon();
    const double delta = state_.params.delta;
    const double log_y0 = std::log(state_.spec.y0);
    const double sign = config_.mutation == Mutation::flip_y_exposure_sign ? -1.0 : 1.0;

    const double eps = sigma2_path_stats_.scale * law_rng_.normal();
    const double proposed = law.sigma2 * std::exp(eps);
    const double stretch = std::exp(0.5 * eps);
    std::vector<double> y_new(n);
    double log_ratio = density::inverse_gamma_log(proposed, hyper_.sigma2.shape, hyper_.sigma2.scale) -
                       density::inverse_gamma_log(law.sigma2, hyper_.sigma2.shape, hyper_.sigma2.scale) + eps;
    for (std::size_t i = 0; i < n; ++i) {
        const double line = log_y0 + law.mu * times[i];
        const double log_y = std::log(state_.y[i]);
        const double log_y_new = line + stretch * (log_y - line);
        y_new[i] = std::exp(log_y_new);
        log_ratio += static_cast<double>(offspring_[i]) * (log_y_new - log_y) -
                     sign * (y_new[i] - state_.y[i]) * exposure(horizon, times[i], delta);
    }
    if (!std::isfinite(log_ratio)) return;  // overflowed proposal: reject
    const bool ok = accept(log_ratio, law_rng_);
    sigma2_path_stats_.record(ok);
    if (ok) {
        law.sigma2 = proposed;
        state_.y = std::move(y_new);
    }
}

void HybridSampler::update_law() {
    const double y0 = state_.spec.y0;
    std::visit(
        [&](auto& law) {
            using Law = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<Law, ConstantLaw>) {
                const auto post = constant_psi_posterior(events_, state_.z, state_.params.delta, hyper_.psi);
                law.psi = law_rng_.gamma(post.shape, post.rate);
                std::fill(state_.y.begin(), state_.y.end(), law.psi);
            } else if constexpr (std::is_same_v<Law, IidGammaLaw>) {
                law.rate = gibbs_gamma_omega(state_.y, law.shape, hyper_.omega, law_rng_);
                update_tau(law);
            } else if constexpr (std::is_same_v<Law, GbmLaw>) {
                const auto x = log_increments(state_.y, y0);
                law.mu = gibbs_gbm_mu(x, gaps_, law.sigma2, hyper_.mu, law_rng_);
                law.sigma2 = gibbs_gbm_sigma2(x, gaps_, law.mu, hyper_.sigma2, law_rng_);
                update_gbm_volatility_path(law);
            } else {
                law.mu = gibbs_langevin_mu(state_.y, y0, gaps_, law.k, law.sigma2, hyper_.mu, law_rng_);
                law.sigma2 = gibbs_langevin_sigma2(state_.y, y0, gaps_, law.k, law.mu, hyper_.sigma2, law_rng_);
                switch (config_.k_update) {
                    case KUpdate::linearized:
                        law.k = gibbs_langevin_k(state_.y, y0, gaps_, law.mu, law.sigma2, hyper_.k, law.k, law_rng_);
                        break;
                    case KUpdate::exact_mh:
                        update_k_exact(law);
                        break;
                    case KUpdate::fixed:
                        break;
                }
            }
        },
        state_.spec.law);
}

std::vector<HybridSampler::BlockStats*> HybridSampler::all_stats() {
    std::vector<BlockStats*> all{&a_stats_,   &lambda0_stats_, &delta_stats_,
                                 &y_stats_,   &tau_stats_,     &k_stats_,
                                 &sigma2_path_stats_};
    for (auto& stats : y_block_stats_) all.push_back(&stats);
    return all;
}

void HybridSampler::adapt() {
    ++batches_;
    const double step = std::min(0.25, 1.0 / std::sqrt(static_cast<double>(batches_)));
    for (BlockStats* stats : all_stats()) {
        if (stats->batch_proposed == 0) continue;
        const double rate = static_cast<double>(stats->batch_accepted) / static_cast<double>(stats->batch_proposed);
        stats->scale *= std::exp(rate > config_.target_acceptance ? step : -step);
        stats->batch_proposed = 0;
        stats->batch_accepted = 0;
    }
}

void HybridSampler::freeze_proposals() {
    y_sd_.resize(state_.y.size());
    for (std::size_t i = 0; i < state_.y.size(); ++i) {
        y_sd_[i] = y_stats_.scale * state_.y[i];
    }
    for (BlockStats* stats : all_stats()) {
        stats->proposed = 0;
        stats->accepted = 0;
    }
    frozen_ = true;
}

void HybridSampler::check_state(std::string_view block) const {
    const auto fail = [&](const std::string& what) {
        throw NumericalError("invalid state after the " + std::string(block) + " update: " + what);
    };
    const auto& p = state_.params;
    if (!positive_finite(p.a) || !positive_finite(p.lambda0) || !positive_finite(p.delta)) {
        fail("base parameters must stay positive and finite");
    }
    for (double v : law_parameter_values(state_.spec)) {
        if (!std::isfinite(v)) fail("contagion law parameter is not finite");
    }
    for (double v : state_.y) {
        if (!positive_finite(v)) fail("excitation level is not positive and finite");
    }
}

std::map<std::string, double> HybridSampler::acceptance_rates() const {
    std::map<std::string, double> rates;
    const auto add = [&](const char* name, const BlockStats& stats) {
        if (stats.proposed > 0) {
            rates[name] = static_cast<double>(stats.accepted) / static_cast<double>(stats.proposed);
        }
    };
    add("a", a_stats_);
    add("lambda0", lambda0_stats_);
    add("delta", delta_stats_);
    add("y", y_stats_);
    add("tau", tau_stats_);
    add("k", k_stats_);
    add("sigma2_path", sigma2_path_stats_);
    BlockStats blocks;
    for (const auto& stats : y_block_stats_) {
        blocks.proposed += stats.proposed;
        blocks.accepted += stats.accepted;
    }
    add("y_block", blocks);
    return rates;
}

Chain run_mcmc(const EventSequence& events, SdeKind kind, const Hyperparams& hyper, const McmcConfig& config) {
    HybridSampler sampler(events, kind, hyper, config);
    sampler.initialize();

    Chain chain;
    chain.kind = kind;
    chain.seed = config.seed;
    const std::size_t kept = (config.iterations - config.burn_in + config.thin - 1) / config.thin;
    chain.iterations.reserve(kept);
    chain.states.reserve(kept);
    chain.log_likelihood.reserve(kept);
    chain.y_posterior_mean.assign(events.size(), 0.0);

    for (std::size_t it = 0; it < config.iterations; ++it) {
        sampler.sweep();
        if (it < config.burn_in || (it - config.burn_in) % config.thin != 0) continue;
        const auto& s = sampler.state();
        for (std::size_t i = 0; i < s.y.size(); ++i) {
            chain.y_posterior_mean[i] += s.y[i];
        }
        ChainState kept_state{s.params, s.spec, {}, {}};
        if (config.keep_latent) {
            kept_state.y = s.y;
            kept_state.z = s.z;
        }
        chain.iterations.push_back(it + 1);
        chain.states.push_back(std::move(kept_state));
        chain.log_likelihood.push_back(sampler.current_log_likelihood());
    }
    for (double& v : chain.y_posterior_mean) {
        v /= static_cast<double>(chain.states.size());
    }
    chain.acceptance_rates = sampler.acceptance_rates();
    return chain;
}

std::vector<Chain> run_chains(const EventSequence& events, SdeKind kind, const Hyperparams& hyper,
                              const McmcConfig& config, std::size_t chains, std::size_t threads) {
    if (chains == 0) {
        throw std::invalid_argument("run_chains: need at least one chain");
    }
    std::vector<Chain> results(chains);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, chains);

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto worker = [&] {
        for (std::size_t c = next++; c < chains; c = next++) {
            try {
                McmcConfig local = config;
                local.seed = Rng::derive_seed(config.seed, 1000 + c);
                results[c] = run_mcmc(events, kind, hyper, local);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return results;
}

}  // namespace stochhawkes
