#include <cmath>
#include <stdexcept>
#include <string>

#include "stochhawkes/diagnostics.hpp"
#include "stochhawkes/simulate.hpp"

namespace stochhawkes {

namespace {

struct Dataset {
    EventSequence events;
    ContagionPath y;
};

Dataset simulate_dataset(const HawkesParams& params, const SdeSpec& spec, const GewekeConfig& config, Rng& rng) {
    SimulationOptions options;
    options.max_events = config.max_events + 1;
    auto sim = simulate(params, spec, config.horizon, rng, options);
    if (sim.events.size() > config.max_events) {
        throw NumericalError("Geweke test: a simulated dataset exceeded " + std::to_string(config.max_events) +
                             " events (a=" + std::to_string(params.a) +
                             ", lambda0=" + std::to_string(params.lambda0) + ", delta=" + std::to_string(params.delta) +
                             "); the priors are too diffuse for this horizon");
    }
    return {std::move(sim.events), std::move(sim.contagion)};
}

/// Variance of the mean of an autocorrelated series by non-overlapping batch means.
double batch_means_variance(const std::vector<double>& x) {
    const std::size_t batches = std::max<std::size_t>(2, static_cast<std::size_t>(std::sqrt(x.size())));
    const std::size_t size = x.size() / batches;
    std::vector<double> means(batches, 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
        for (std::size_t t = b * size; t < (b + 1) * size; ++t) means[b] += x[t];
        means[b] /= static_cast<double>(size);
    }
    double grand = 0.0;
    for (double m : means) grand += m;
    grand /= static_cast<double>(batches);
    double ss = 0.0;
    for (double m : means) ss += (m - grand) * (m - grand);
    return ss / static_cast<double>(batches - 1) / static_cast<double>(batches);
}

double iid_mean_variance(const std::vector<double>& x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size());
}

double mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

}  // namespace

Hyperparams geweke_hyperparams() {
    Hyperparams h;
    h.a = {20.0, 20.0};
    h.lambda0 = {10.0, 10.0};
    h.delta = {20.0, 10.0};
    h.tau = {20.0, 10.0};
    h.omega = {40.0, 10.0};
    h.psi = {20.0, 40.0};
    h.mu = {0.0, 0.0025};
    h.sigma2 = {10.0, 0.18};
    h.k = {1.0, 0.04};
    h.y0 = 0.4;
    return h;
}

std::vector<GewekeMoment> geweke_joint_test(SdeKind kind, const Hyperparams& hyper, const GewekeConfig& config) {
    if (config.rounds < 4) {
        throw InsufficientData("Geweke test needs at least 4 rounds");
    }
    if (config.sweeps_per_round == 0) {
        throw std::invalid_argument("Geweke test: sweeps_per_round must be at least 1");
    }
    hyper.validate();
    const auto names = parameter_names(kind);
    const std::size_t dims = names.size();
    Rng root(config.seed);

    // Marginal-conditional side: the parameters' marginal is the prior itself.
    std::vector<std::vector<double>> prior_draws(dims);
    Rng prior_rng = root.split(1);
    for (std::size_t r = 0; r < config.rounds; ++r) {
        const auto d = draw_from_prior(kind, hyper, prior_rng);
        const ChainState s{d.params, d.spec, {}, {}};
        const auto values = parameter_values(s);
        for (std::size_t p = 0; p < dims; ++p) prior_draws[p].push_back(values[p]);
    }

    // Successive-conditional side: sampler sweeps on the current data alternate with
    // fresh data drawn given the current parameters.
    std::vector<std::vector<double>> sampler_draws(dims);
    Rng data_rng = root.split(2);
    McmcConfig mcmc;
    mcmc.iterations = 1;
    mcmc.burn_in = 0;
    mcmc.fixed_proposal = config.proposal;
    mcmc.mutation = config.mutation;
    mcmc.k_update = config.k_update;

    auto start = draw_from_prior(kind, hyper, data_rng);
    ChainState state{start.params, start.spec, {}, {}};
    auto data = simulate_dataset(state.params, state.spec, config, data_rng);
    for (std::size_t r = 0; r < config.rounds; ++r) {
        state.y = std::move(data.y);
        state.z = gibbs_sample_z(data.events, state.y, state.params, data_rng);
        mcmc.seed = Rng::derive_seed(config.seed, 100 + r);
        HybridSampler sampler(std::move(data.events), kind, hyper, mcmc);
        sampler.set_state(std::move(state));
        for (std::size_t s = 0; s < config.sweeps_per_round; ++s) sampler.sweep();
        state = sampler.state();
        const auto values = parameter_values(state);
        for (std::size_t p = 0; p < dims; ++p) sampler_draws[p].push_back(values[p]);
        data = simulate_dataset(state.params, state.spec, config, data_rng);
    }

    std::vector<GewekeMoment> out;
    for (std::size_t p = 0; p < dims; ++p) {
        for (int moment = 1; moment <= 2; ++moment) {
            auto g_prior = prior_draws[p];
            auto g_sampler = sampler_draws[p];
            if (moment == 2) {
                for (double& v : g_prior) v *= v;
                for (double& v : g_sampler) v *= v;
            }
            GewekeMoment m;
            m.parameter = names[p];
            m.moment = moment;
            m.prior_mean = mean(g_prior);
            m.sampler_mean = mean(g_sampler);
            const double se = std::sqrt(iid_mean_variance(g_prior) + batch_means_variance(g_sampler));
            m.z = (m.sampler_mean - m.prior_mean) / se;
            if (!std::isfinite(m.prior_mean) || !std::isfinite(m.sampler_mean)) {
                throw NumericalError("Geweke test: non-finite moment for " + names[p]);
            }
            if (!std::isfinite(m.z)) {
                // Both sides constant and equal gives a zero numerator over a zero error.
                m.z = m.sampler_mean == m.prior_mean ? 0.0 : std::copysign(INFINITY, m.sampler_mean - m.prior_mean);
            }
            out.push_back(std::move(m));
        }
    }
    return out;
}

}  // namespace stochhawkes
