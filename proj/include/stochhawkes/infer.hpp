#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stochhawkes/random.hpp"
#include "stochhawkes/types.hpp"

namespace stochhawkes {

struct GammaPrior {
    double shape;
    double rate;
};

struct NormalPrior {
    double mean;
    double variance;
};

/// Density proportional to x^{-shape-1} e^{-scale/x}.
struct InverseGammaPrior {
    double shape;
    double scale;
};

struct Hyperparams {
    GammaPrior a{2.0, 2.0};
    GammaPrior lambda0{2.0, 2.0};
    GammaPrior delta{2.0, 1.0};
    GammaPrior tau{2.0, 1.0};
    GammaPrior omega{2.0, 1.0};
    GammaPrior psi{1.0, 2.0};
    NormalPrior mu{0.0, 1.0};
    InverseGammaPrior sigma2{3.0, 0.2};
    NormalPrior k{1.0, 1.0};
    /// Known starting level Y_0 of the path laws.
    double y0{1.0};

    void validate() const;
};

struct NormalPosterior {
    double mean;
    double variance;
};

struct GammaPosterior {
    double shape;
    double rate;
};

struct InverseGammaPosterior {
    double shape;
    double scale;
};

/// Latent and parameter configuration of one sampler iteration.
struct ChainState {
    HawkesParams params;
    SdeSpec spec;
    ContagionPath y;
    BranchingStructure z;
};

// ---------------------------------------------------------------------------
// Branching structure

/// Posterior parent distribution of event i (zero-based): slot 0 is the immigrant
/// probability, slot j the probability that event j - 1 is the parent.
std::vector<double> branching_probabilities(std::size_t i, const EventSequence& events,
                                            std::span<const double> y, const HawkesParams& params);

/// Draws every parent independently from its posterior. The normalizer comes from the
/// exponential-kernel recursion, so the cost per event is the number of candidate parents
/// scanned before the draw lands, not i.
BranchingStructure gibbs_sample_z(const EventSequence& events, std::span<const double> y,
                                  const HawkesParams& params, Rng& rng);

// ---------------------------------------------------------------------------
// GBM contagion parameters. x are the log-increments log(Y_i / Y_{i-1}).

std::vector<double> log_increments(std::span<const double> y, double y0);

NormalPosterior gbm_mu_posterior(std::span<const double> x, std::span<const double> gaps, double sigma2,
                                 const NormalPrior& prior);
double gibbs_gbm_mu(std::span<const double> x, std::span<const double> gaps, double sigma2,
                    const NormalPrior& prior, Rng& rng);

InverseGammaPosterior gbm_sigma2_posterior(std::span<const double> x, std::span<const double> gaps, double mu,
                                           const InverseGammaPrior& prior);
double gibbs_gbm_sigma2(std::span<const double> x, std::span<const double> gaps, double mu,
                        const InverseGammaPrior& prior, Rng& rng);

// ---------------------------------------------------------------------------
// Exponential Langevin contagion parameters.

NormalPosterior langevin_mu_posterior(std::span<const double> y, double y0, std::span<const double> gaps,
                                      double k, double sigma2, const NormalPrior& prior);
double gibbs_langevin_mu(std::span<const double> y, double y0, std::span<const double> gaps, double k,
                         double sigma2, const NormalPrior& prior, Rng& rng);

/// Exact conditional of sigma2 given the path: beta0 + sum k r_i^2 / (phi_i^- phi_i^+).
InverseGammaPosterior langevin_sigma2_posterior(std::span<const double> y, double y0,
                                                std::span<const double> gaps, double k, double mu,
                                                const InverseGammaPrior& prior);
double gibbs_langevin_sigma2(std::span<const double> y, double y0, std::span<const double> gaps, double k,
                             double mu, const InverseGammaPrior& prior, Rng& rng);

/// First-order (e^x ~ 1 + x) approximate conditional for k, with the unnamed k_0 taken
/// as the prior mean. Empty when the implied variance is not positive.
std::optional<NormalPosterior> langevin_k_linearized_posterior(std::span<const double> y, double y0,
                                                               std::span<const double> gaps, double mu,
                                                               double sigma2, const NormalPrior& prior);

/// Draw from the linearized conditional, redrawing non-positive values up to
/// `max_retries` times; keeps `current_k` when that fails or the conditional is degenerate.
double gibbs_langevin_k(std::span<const double> y, double y0, std::span<const double> gaps, double mu,
                        double sigma2, const NormalPrior& prior, double current_k, Rng& rng,
                        int max_retries = 100);

// ---------------------------------------------------------------------------
// iid Gamma contagion.

GammaPosterior gamma_y_posterior(std::size_t i, const EventSequence& events, std::size_t offspring,
                                 double delta, double tau, double omega);
double gibbs_gamma_y(std::size_t i, const EventSequence& events, const BranchingStructure& z,
                     const HawkesParams& params, double tau, double omega, Rng& rng);

GammaPosterior gamma_omega_posterior(std::span<const double> y, double tau, const GammaPrior& prior);
double gibbs_gamma_omega(std::span<const double> y, double tau, const GammaPrior& prior, Rng& rng);

/// log A(tau') for a symmetric proposal.
double mh_log_accept_tau(double tau_new, double tau, double omega, std::span<const double> y,
                         const GammaPrior& prior);

// ---------------------------------------------------------------------------
// Constant contagion (classical Hawkes). Conjugate Gamma update for psi.

GammaPosterior constant_psi_posterior(const EventSequence& events, const BranchingStructure& z, double delta,
                                      const GammaPrior& prior);

// ---------------------------------------------------------------------------
// Closed-form Metropolis-Hastings ratios.

/// log A(Y_i') under GBM contagion for a symmetric proposal. `offspring` holds the
/// number of direct children of every event.
double mh_log_accept_y_gbm(std::size_t i, double y_new, const EventSequence& events, std::span<const double> y,
                           std::span<const std::size_t> offspring, const HawkesParams& params, const GbmLaw& law,
                           double y0);

/// log A(a') for a symmetric proposal.
double mh_log_accept_a(double a_new, const EventSequence& events, const BranchingStructure& z,
                       const HawkesParams& params, const GammaPrior& prior);

// ---------------------------------------------------------------------------
// Posterior-difference route.

/// Unnormalized log posterior of a full state.
double log_posterior(const EventSequence& events, const ChainState& state, const Hyperparams& hyper);

enum class GenericBlock { lambda0, delta, y_level, k };

/// log pi(proposed) - log pi(current) where only `block` changes (`index` selects the
/// event for y_level). Terms that do not depend on the block are left out, so the
/// result equals the difference of full log posteriors.
double mh_log_accept_generic(GenericBlock block, double proposed, const EventSequence& events,
                             const ChainState& state, const Hyperparams& hyper, std::size_t index = 0);

/// Log-ratio for changing Y_i alone under any path law, computed locally from the
/// neighbouring transitions, the exposure term and the offspring count.
double y_level_log_ratio(std::size_t i, double y_new, const EventSequence& events, std::span<const double> y,
                         std::span<const std::size_t> offspring, const HawkesParams& params, const SdeSpec& spec);

// ---------------------------------------------------------------------------
// Sampler.

enum class KUpdate { linearized, exact_mh, fixed };
enum class InitMode { prior, deterministic };
/// Test hook for sampler-correctness harnesses.
enum class Mutation { none, flip_y_exposure_sign };

/// Absolute proposal standard deviations. `y` is shared by every excitation level.
struct ProposalScales {
    double a{0.1};
    double lambda0{0.1};
    double delta{0.1};
    double tau{0.1};
    double k{0.1};
    double y{0.1};
    double y_block{0.1};  // log-scale shift of a block of two levels; shrinks by sqrt(2) per doubling
    double sigma2_path{0.1};  // log-scale step of the joint volatility/path move
};

struct McmcConfig {
    std::size_t iterations{20000};  // total sweeps, burn-in included
    std::size_t burn_in{5000};
    std::size_t thin{1};
    std::uint64_t seed{1};
    KUpdate k_update{KUpdate::exact_mh};
    InitMode init{InitMode::prior};
    bool keep_latent{false};
    /// When set, proposals use these scales throughout and nothing is adapted.
    std::optional<ProposalScales> fixed_proposal;
    double target_acceptance{0.23};
    std::size_t adapt_interval{50};
    Mutation mutation{Mutation::none};

    void validate() const;
};

struct Chain {
    SdeKind kind{SdeKind::gbm};
    std::uint64_t seed{0};
    std::vector<std::size_t> iterations;
    std::vector<ChainState> states;  // y and z are empty unless keep_latent
    std::vector<double> log_likelihood;
    std::map<std::string, double> acceptance_rates;
    ContagionPath y_posterior_mean;

    std::vector<std::string> parameter_names() const;
    /// Draws of one named parameter across retained states.
    std::vector<double> parameter(std::string_view name) const;
};

std::vector<std::string> parameter_names(SdeKind kind);

/// (a, lambda0, delta) and the law parameters drawn from their priors; k is drawn from its
/// normal prior truncated to k > 0. The path laws start at hyper.y0.
struct PriorDraw {
    HawkesParams params;
    SdeSpec spec;
};
PriorDraw draw_from_prior(SdeKind kind, const Hyperparams& hyper, Rng& rng);

std::vector<double> parameter_values(const ChainState& state);

/// One systematic-scan Gibbs/Metropolis-Hastings kernel over (Z, Y, a, lambda0, delta,
/// law parameters) for a fixed event sequence.
class HybridSampler {
public:
    HybridSampler(EventSequence events, SdeKind kind, Hyperparams hyper, McmcConfig config);

    /// Draws the starting state: from the priors, or deterministically with a = lambda0 = n / (2T),
    /// levels at y0 (or the law's prior mean) and delta twice that level.
    void initialize();
    void set_state(ChainState state);
    const ChainState& state() const noexcept { return state_; }
    const EventSequence& events() const noexcept { return events_; }

    /// One pass: Z, then Y, then a, lambda0, delta, then the law parameters.
    void sweep();

    std::size_t iteration() const noexcept { return iteration_; }
    double current_log_likelihood() const noexcept { return log_likelihood_; }
    std::map<std::string, double> acceptance_rates() const;

private:
    struct BlockStats {
        std::size_t proposed{0};
        std::size_t accepted{0};
        std::size_t batch_proposed{0};
        std::size_t batch_accepted{0};
        double scale{0.1};
        void record(bool accept);
    };

    void update_z();
    void update_y();
    void update_y_blocks();
    void update_a();
    void update_lambda0();
    void update_delta();
    void update_law();
    void update_k_exact(ExpLangevinLaw& law);
    void update_tau(IidGammaLaw& law);
    void update_gbm_volatility_path(GbmLaw& law);
    bool accept(double log_ratio, Rng& rng);
    void adapt();
    void freeze_proposals();
    void check_state(std::string_view block) const;
    void refresh_offspring();
    double y_proposal_sd(std::size_t i) const;

    EventSequence events_;
    std::vector<double> gaps_;
    SdeKind kind_;
    Hyperparams hyper_;
    McmcConfig config_;
    ChainState state_;
    std::vector<std::size_t> offspring_;
    std::vector<double> y_sd_;
    bool frozen_{false};
    std::size_t iteration_{0};
    std::size_t batches_{0};
    double log_likelihood_{0.0};

    Rng init_rng_;
    Rng z_rng_;
    Rng y_rng_;
    Rng base_rng_;
    Rng law_rng_;

    BlockStats a_stats_, lambda0_stats_, delta_stats_, y_stats_, tau_stats_, k_stats_;
    BlockStats sigma2_path_stats_;
    std::vector<BlockStats> y_block_stats_;  // one per dyadic block size 2, 4, 8, ...
    std::vector<BlockStats*> all_stats();
};

/// Runs one chain and returns the thinned post-burn-in draws.
Chain run_mcmc(const EventSequence& events, SdeKind kind, const Hyperparams& hyper, const McmcConfig& config);

/// Independent chains with seeds derived from config.seed, run concurrently.
std::vector<Chain> run_chains(const EventSequence& events, SdeKind kind, const Hyperparams& hyper,
                              const McmcConfig& config, std::size_t chains, std::size_t threads = 0);

}  // namespace stochhawkes
