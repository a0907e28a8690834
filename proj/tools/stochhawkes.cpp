// Command-line driver: simulate, infer, diagnose, em-check, bench.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "stochhawkes/diagnostics.hpp"
#include "stochhawkes/em.hpp"
#include "stochhawkes/infer.hpp"
#include "stochhawkes/io.hpp"
#include "stochhawkes/model.hpp"
#include "stochhawkes/simulate.hpp"

namespace fs = std::filesystem;
using namespace stochhawkes;
using io::ConfigError;

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kDomainError = 3, kNumericalError = 4 };

/// Input data that cannot be used (empty event file and the like).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct KeySpec {
    std::string name;
    std::optional<std::string> fallback;
    std::string help;
    bool flag{false};
};

/// Keys of one subcommand, bound to CLI11 options. Resolution order: defaults, then the
/// --config file, then flags given on the command line.
class Settings {
public:
    Settings(CLI::App* app, std::vector<KeySpec> keys) : app_(app), keys_(std::move(keys)) {
        app_->add_option("--config", config_path_, "key=value configuration file");
        for (const auto& key : keys_) {
            std::string flag_name = "--" + key.name;
            std::replace(flag_name.begin(), flag_name.end(), '_', '-');
            if (key.flag) {
                app_->add_flag(flag_name, flags_[key.name], key.help);
            } else {
                app_->add_option(flag_name, values_[key.name], key.help);
            }
        }
    }

    void resolve() {
        for (const auto& key : keys_) {
            if (key.fallback) resolved_[key.name] = *key.fallback;
        }
        if (!config_path_.empty()) {
            for (const auto& [k, v] : io::read_config(config_path_)) {
                if (io::is_reserved_manifest_key(k)) continue;
                const bool known = std::any_of(keys_.begin(), keys_.end(), [&](const KeySpec& s) { return s.name == k; });
                if (!known) throw ConfigError(k, "unknown configuration key '" + k + "'");
                resolved_[k] = v;
            }
        }
        for (const auto& key : keys_) {
            std::string flag_name = "--" + key.name;
            std::replace(flag_name.begin(), flag_name.end(), '_', '-');
            if (app_->count(flag_name) == 0) continue;
            resolved_[key.name] = key.flag ? (flags_[key.name] ? "true" : "false") : values_[key.name];
        }
    }

    bool has(const std::string& key) const { return resolved_.contains(key); }

    const std::string& text(const std::string& key) const {
        const auto it = resolved_.find(key);
        if (it == resolved_.end()) throw ConfigError(key, "missing required key '" + key + "'");
        return it->second;
    }
    double number(const std::string& key) const { return io::parse_double(text(key), key); }
    std::uint64_t count(const std::string& key) const { return io::parse_uint(text(key), key); }
    bool boolean(const std::string& key) const { return has(key) && io::parse_bool(text(key), key); }

    /// The recorded seed: given, or drawn once and written to the manifest.
    std::uint64_t seed() {
        if (!has("seed")) resolved_["seed"] = std::to_string(std::random_device{}() * 4294967296ULL + std::random_device{}());
        return count("seed");
    }

    const io::Config& resolved() const { return resolved_; }

private:
    CLI::App* app_;
    std::vector<KeySpec> keys_;
    std::string config_path_;
    std::map<std::string, std::string> values_;
    std::map<std::string, bool> flags_;
    io::Config resolved_;
};

// ---------------------------------------------------------------------------
// Shared key groups

std::vector<KeySpec> model_keys() {
    return {
        {"model", std::nullopt, "constant | gamma | gbm | langevin"},
        {"a", std::nullopt, "asymptotic base rate"},
        {"lambda0", std::nullopt, "initial base intensity"},
        {"delta", std::nullopt, "kernel decay rate"},
        {"psi", std::nullopt, "constant excitation (model=constant)"},
        {"tau", std::nullopt, "gamma shape (model=gamma)"},
        {"omega", std::nullopt, "gamma rate (model=gamma)"},
        {"mu", std::nullopt, "drift / long-run log level (gbm, langevin)"},
        {"sigma2", std::nullopt, "diffusion variance (gbm, langevin)"},
        {"k", std::nullopt, "mean-reversion rate (langevin)"},
        {"y0", "1", "initial excitation level"},
    };
}

std::vector<KeySpec> concat(std::vector<KeySpec> a, const std::vector<KeySpec>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

SdeKind model_kind(const Settings& s) {
    try {
        return parse_sde_kind(s.text("model"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("model", e.what());
    }
}

HawkesParams hawkes_params(const Settings& s) {
    HawkesParams p{s.number("a"), s.number("lambda0"), s.number("delta")};
    p.validate();
    return p;
}

SdeSpec sde_spec(const Settings& s) {
    SdeSpec spec;
    switch (model_kind(s)) {
        case SdeKind::constant: spec = SdeSpec::constant(s.number("psi")); break;
        case SdeKind::iid_gamma: spec = SdeSpec::iid_gamma(s.number("tau"), s.number("omega")); break;
        case SdeKind::gbm: spec = SdeSpec::gbm(s.number("mu"), s.number("sigma2"), s.number("y0")); break;
        case SdeKind::exp_langevin:
            spec = SdeSpec::exp_langevin(s.number("k"), s.number("mu"), s.number("sigma2"), s.number("y0"));
            break;
    }
    spec.validate();
    return spec;
}

double horizon_for(const Settings& s, const fs::path& events_path) {
    if (s.has("horizon")) return s.number("horizon");
    const auto manifest = events_path.parent_path() / "manifest.txt";
    if (fs::exists(manifest)) {
        const auto m = io::read_config(manifest);
        if (const auto it = m.find("horizon"); it != m.end()) return io::parse_double(it->second, "horizon");
    }
    throw ConfigError("horizon", "missing required key 'horizon' (not given and no manifest.txt next to the events)");
}

EventSequence load_events(const Settings& s) {
    const fs::path path = s.text("events");
    auto times = io::read_event_times(path);
    if (times.empty()) throw DataError(path.string() + ": no events");
    return EventSequence(std::move(times), horizon_for(s, path));
}

std::size_t worker_count(const Settings& s, std::size_t jobs) {
    std::size_t threads = s.has("threads") ? s.count("threads") : 0;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    return std::max<std::size_t>(1, std::min(threads, jobs));
}

/// Runs job(i) for i in [0, jobs) on a small pool; rethrows the first failure.
template <typename Job>
void parallel_for(std::size_t jobs, std::size_t threads, Job job) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs; i = next++) {
            try {
                job(i);
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

fs::path out_dir(const Settings& s) {
    fs::path dir = s.text("out");
    fs::create_directories(dir);
    return dir;
}

// ---------------------------------------------------------------------------
// simulate

void cmd_simulate(Settings& s) {
    const auto params = hawkes_params(s);
    const auto spec = sde_spec(s);
    const double horizon = s.number("horizon");
    const std::uint64_t seed = s.seed();
    const std::size_t replicates = s.count("replicates");
    if (replicates == 0) throw ConfigError("replicates", "replicates must be at least 1");
    const auto dir = out_dir(s);

    SimulationOptions options;
    options.record_trace = s.boolean("trace");
    if (s.has("max_events")) options.max_events = s.count("max_events");

    if (replicates == 1) {
        Rng rng(seed);
        auto result = simulate(params, spec, horizon, rng, options);
        io::write_events(dir / "events.csv", result.events);
        io::write_contagion(dir / "contagion.csv", result.events, result.contagion);
        if (options.record_trace) {
            const auto trace = intensity_trace(result.events, result.contagion, params, s.count("trace_points"));
            io::write_trace(dir / "trace.csv", trace);
        }
        io::write_manifest(dir / "manifest.txt", "simulate", seed, s.resolved());
        std::cout << "events=" << result.events.size() << " horizon=" << io::format_double(result.events.horizon())
                  << " seed=" << seed << '\n';
        return;
    }

    options.record_trace = false;
    std::vector<std::size_t> counts(replicates);
    parallel_for(replicates, worker_count(s, replicates), [&](std::size_t r) {
        Rng rng(Rng::derive_seed(seed, r));
        counts[r] = simulate(params, spec, horizon, rng, options).events.size();
    });
    std::ofstream table(dir / "replicates.csv");
    table << "replicate,seed,events\n";
    double mean = 0.0;
    for (std::size_t r = 0; r < replicates; ++r) {
        table << r << ',' << Rng::derive_seed(seed, r) << ',' << counts[r] << '\n';
        mean += static_cast<double>(counts[r]);
    }
    mean /= static_cast<double>(replicates);
    double ss = 0.0;
    for (auto c : counts) ss += (static_cast<double>(c) - mean) * (static_cast<double>(c) - mean);
    const double se = std::sqrt(ss / static_cast<double>(replicates - 1) / static_cast<double>(replicates));
    io::write_manifest(dir / "manifest.txt", "simulate", seed, s.resolved());
    std::cout << "replicates=" << replicates << " mean_events=" << io::format_double(mean)
              << " standard_error=" << io::format_double(se) << " seed=" << seed << '\n';
}

// ---------------------------------------------------------------------------
// infer

std::vector<KeySpec> prior_keys() {
    const Hyperparams h;
    const auto num = [](double v) { return std::optional<std::string>(io::format_double(v)); };
    return {
        {"prior_a_shape", num(h.a.shape), "gamma prior on a"},
        {"prior_a_rate", num(h.a.rate), "gamma prior on a"},
        {"prior_lambda0_shape", num(h.lambda0.shape), "gamma prior on lambda0"},
        {"prior_lambda0_rate", num(h.lambda0.rate), "gamma prior on lambda0"},
        {"prior_delta_shape", num(h.delta.shape), "gamma prior on delta"},
        {"prior_delta_rate", num(h.delta.rate), "gamma prior on delta"},
        {"prior_tau_shape", num(h.tau.shape), "gamma prior on tau"},
        {"prior_tau_rate", num(h.tau.rate), "gamma prior on tau"},
        {"prior_omega_shape", num(h.omega.shape), "gamma prior on omega"},
        {"prior_omega_rate", num(h.omega.rate), "gamma prior on omega"},
        {"prior_psi_shape", num(h.psi.shape), "gamma prior on psi"},
        {"prior_psi_rate", num(h.psi.rate), "gamma prior on psi"},
        {"prior_mu_mean", num(h.mu.mean), "normal prior on mu"},
        {"prior_mu_variance", num(h.mu.variance), "normal prior on mu"},
        {"prior_sigma2_shape", num(h.sigma2.shape), "inverse-gamma prior on sigma2"},
        {"prior_sigma2_scale", num(h.sigma2.scale), "inverse-gamma prior on sigma2"},
        {"prior_k_mean", num(h.k.mean), "normal prior on k (truncated to k > 0)"},
        {"prior_k_variance", num(h.k.variance), "normal prior on k"},
    };
}

Hyperparams hyperparams(const Settings& s) {
    Hyperparams h;
    h.a = {s.number("prior_a_shape"), s.number("prior_a_rate")};
    h.lambda0 = {s.number("prior_lambda0_shape"), s.number("prior_lambda0_rate")};
    h.delta = {s.number("prior_delta_shape"), s.number("prior_delta_rate")};
    h.tau = {s.number("prior_tau_shape"), s.number("prior_tau_rate")};
    h.omega = {s.number("prior_omega_shape"), s.number("prior_omega_rate")};
    h.psi = {s.number("prior_psi_shape"), s.number("prior_psi_rate")};
    h.mu = {s.number("prior_mu_mean"), s.number("prior_mu_variance")};
    h.sigma2 = {s.number("prior_sigma2_shape"), s.number("prior_sigma2_scale")};
    h.k = {s.number("prior_k_mean"), s.number("prior_k_variance")};
    h.y0 = s.number("y0");
    try {
        h.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("prior", e.what());
    }
    return h;
}

KUpdate k_update(const Settings& s) {
    const auto& v = s.text("k_update");
    if (v == "linearized") return KUpdate::linearized;
    if (v == "exact-mh" || v == "exact_mh") return KUpdate::exact_mh;
    if (v == "fixed") return KUpdate::fixed;
    throw ConfigError("k_update", "k_update must be linearized, exact-mh or fixed");
}

InitMode init_mode(const Settings& s) {
    const auto& v = s.text("init");
    if (v == "prior") return InitMode::prior;
    if (v == "deterministic") return InitMode::deterministic;
    throw ConfigError("init", "init must be prior or deterministic");
}

void print_summary(const std::vector<ParameterSummary>& summary) {
    std::cout << "parameter        mean       q05       q95       ess      rhat\n";
    for (const auto& p : summary) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-10s %10.5g %9.5g %9.5g %9.1f %9.4f\n", p.name.c_str(), p.mean, p.q05,
                      p.q95, p.ess, p.rhat);
        std::cout << line;
    }
}

void cmd_infer(Settings& s) {
    const auto kind = model_kind(s);
    const auto hyper = hyperparams(s);
    McmcConfig config;
    config.iterations = s.count("iters");
    config.burn_in = s.count("burnin");
    config.thin = s.count("thin");
    config.k_update = k_update(s);
    config.init = init_mode(s);
    config.keep_latent = s.boolean("save_latent");
    config.seed = s.seed();
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("iters", e.what());
    }
    const std::size_t chains = s.count("chains");
    if (chains == 0) throw ConfigError("chains", "chains must be at least 1");
    const auto events = load_events(s);
    const auto dir = out_dir(s);

    std::vector<Chain> results;
    if (chains == 1) {
        results.push_back(run_mcmc(events, kind, hyper, config));
    } else {
        results = run_chains(events, kind, hyper, config, chains, worker_count(s, chains));
    }
    for (std::size_t c = 0; c < results.size(); ++c) {
        const std::string suffix = chains == 1 ? "" : "_" + std::to_string(c + 1);
        io::write_chain(dir / ("chain" + suffix + ".csv"), results[c]);
        if (config.keep_latent) io::write_latent(dir / ("latent" + suffix + ".csv"), results[c]);
    }
    const auto summary = chain_summary(results);
    io::write_summary(dir / "summary.csv", summary);
    io::write_acceptance(dir / "acceptance.csv", results.front().acceptance_rates);
    io::write_manifest(dir / "manifest.txt", "infer", config.seed, s.resolved());

    std::cout << "events=" << events.size() << " model=" << to_string(kind) << " chains=" << chains << '\n';
    print_summary(summary);
    std::cout << "acceptance:";
    for (const auto& [block, rate] : results.front().acceptance_rates) {
        std::cout << ' ' << block << '=' << io::format_double(std::round(rate * 1000.0) / 1000.0);
    }
    std::cout << '\n';
}

// ---------------------------------------------------------------------------
// diagnose

void run_geweke(Settings& s, const fs::path& dir) {
    const auto kind = model_kind(s);
    GewekeConfig config;
    config.rounds = s.count("rounds");
    config.sweeps_per_round = s.count("sweeps");
    config.horizon = s.number("geweke_horizon");
    config.seed = s.seed();
    config.k_update = k_update(s);
    const auto moments = geweke_joint_test(kind, geweke_hyperparams(), config);
    std::ofstream out(dir / "geweke.csv");
    out << "parameter,moment,prior_mean,sampler_mean,z\n";
    std::cout << "geweke model=" << to_string(kind) << " rounds=" << config.rounds << '\n';
    double worst = 0.0;
    for (const auto& m : moments) {
        out << m.parameter << ',' << m.moment << ',' << io::format_double(m.prior_mean) << ','
            << io::format_double(m.sampler_mean) << ',' << io::format_double(m.z) << '\n';
        char line[128];
        std::snprintf(line, sizeof(line), "  %-8s moment %d  z=%8.3f\n", m.parameter.c_str(), m.moment, m.z);
        std::cout << line;
        worst = std::max(worst, std::abs(m.z));
    }
    std::cout << "max_abs_z=" << io::format_double(worst) << '\n';
}

void run_rescaling(Settings& s, const fs::path& dir) {
    const auto events = load_events(s);
    const auto params = hawkes_params(s);
    std::vector<double> y;
    if (s.has("contagion")) {
        auto file = io::read_contagion(s.text("contagion"));
        if (file.times.size() != events.size()) throw DataError("contagion file does not match the event file");
        y = std::move(file.levels);
    } else if (model_kind(s) == SdeKind::constant) {
        y.assign(events.size(), s.number("psi"));
    } else {
        throw ConfigError("contagion", "missing required key 'contagion' for a stochastic excitation model");
    }
    const auto result = time_rescaling_test(events, y, params);
    std::ofstream out(dir / "rescaling.csv");
    out << "n,statistic,p_value\n"
        << result.n << ',' << io::format_double(result.statistic) << ',' << io::format_double(result.p_value) << '\n';
    std::cout << "time_rescaling n=" << result.n << " ks=" << io::format_double(result.statistic)
              << " p=" << io::format_double(result.p_value) << '\n';
}

void run_summary(Settings& s, const fs::path& dir) {
    const auto kind = model_kind(s);
    std::vector<Chain> chains;
    std::stringstream list(s.text("chain_files"));
    std::string path;
    while (std::getline(list, path, ',')) {
        if (!path.empty()) chains.push_back(io::read_chain(path, kind));
    }
    const auto summary = chain_summary(chains);
    io::write_summary(dir / "summary.csv", summary);
    print_summary(summary);
}

void run_renewal(Settings& s, const fs::path& dir) {
    const auto params = hawkes_params(s);
    const auto spec = sde_spec(s);
    const double end = s.number("grid_end");
    const std::size_t points = s.count("grid_points");
    if (points < 2 || !(end > 0.0)) throw ConfigError("grid_points", "need grid_end > 0 and at least 2 grid points");
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) grid[i] = end * static_cast<double>(i) / static_cast<double>(points - 1);
    const auto curve = expected_intensity_curve(params, mean_excitation(spec), grid);
    std::ofstream out(dir / "renewal.csv");
    out << "t,mean_intensity\n";
    for (std::size_t i = 0; i < points; ++i) out << io::format_double(grid[i]) << ',' << io::format_double(curve[i]) << '\n';
    std::cout << "renewal points=" << points << " m(end)=" << io::format_double(curve.back()) << '\n';
}

void cmd_diagnose(Settings& s) {
    const bool any = s.boolean("geweke") || s.boolean("rescaling") || s.boolean("summary") || s.boolean("renewal");
    if (!any) throw ConfigError("geweke", "choose at least one of --geweke, --rescaling, --summary, --renewal");
    const auto dir = out_dir(s);
    const std::uint64_t seed = s.seed();
    if (s.boolean("geweke")) run_geweke(s, dir);
    if (s.boolean("rescaling")) run_rescaling(s, dir);
    if (s.boolean("summary")) run_summary(s, dir);
    if (s.boolean("renewal")) run_renewal(s, dir);
    io::write_manifest(dir / "manifest.txt", "diagnose", seed, s.resolved());
}

// ---------------------------------------------------------------------------
// em-check

void cmd_em_check(Settings& s) {
    const auto events = load_events(s);
    const auto params = hawkes_params(s);
    const double psi = s.number("psi");
    const auto r = em_responsibilities(events, params, psi);
    const std::vector<double> y(events.size(), psi);
    double worst = 0.0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto p = branching_probabilities(i, events, y, params);
        worst = std::max(worst, std::abs(r[i][i] - p[0]));
        for (std::size_t j = 0; j < i; ++j) worst = std::max(worst, std::abs(r[i][j] - p[j + 1]));
    }
    const auto dir = out_dir(s);
    std::ofstream out(dir / "em_check.csv");
    out << "events,max_abs_difference\n" << events.size() << ',' << io::format_double(worst) << '\n';
    io::write_manifest(dir / "manifest.txt", "em-check", 0, s.resolved());
    std::cout << "events=" << events.size() << " max_abs_difference=" << io::format_double(worst) << '\n';
}

// ---------------------------------------------------------------------------
// bench

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void cmd_bench(Settings& s) {
    std::vector<std::size_t> targets;
    std::stringstream list(s.text("events"));
    std::string item;
    while (std::getline(list, item, ',')) targets.push_back(io::parse_uint(item, "events"));
    if (targets.empty()) throw ConfigError("events", "events must list at least one target size");
    const std::size_t runs = s.count("runs");
    const std::size_t ogata_max = s.count("ogata_max");
    const std::uint64_t seed = s.seed();
    if (runs == 0) throw ConfigError("runs", "runs must be at least 1");

    // Stationary setting: branching ratio 1/2, so the mean rate is 2a.
    const HawkesParams params{1.0, 1.0, 1.0};
    const auto spec = SdeSpec::iid_gamma(2.0, 4.0);
    const double rate = 2.0 * params.a;

    const auto time_one = [&](auto&& sampler, std::size_t target, std::uint64_t run_seed) {
        const double horizon = static_cast<double>(target) / rate;
        const std::size_t reps = std::max<std::size_t>(1, 100000 / target);
        const auto start = std::chrono::steady_clock::now();
        std::size_t total = 0;
        for (std::size_t r = 0; r < reps; ++r) {
            Rng rng(Rng::derive_seed(run_seed, r));
            total += sampler(params, spec, horizon, rng, SimulationOptions{}).events.size();
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (total == 0) throw NumericalError("bench produced no events");
        return elapsed / static_cast<double>(reps);
    };

    const auto dir = out_dir(s);
    std::ofstream out(dir / "bench.csv");
    out << "events,simulate_seconds,ogata_seconds,simulate_ratio,ogata_ratio\n";
    std::cout << "events     simulate_s    ogata_s   sim_ratio  ogata_ratio\n";
    double previous_sim = 0.0;
    double previous_ogata = 0.0;
    for (const auto target : targets) {
        std::vector<double> sim_times;
        std::vector<double> ogata_times;
        for (std::size_t run = 0; run < runs; ++run) {
            const auto run_seed = Rng::derive_seed(seed, target * 16 + run);
            sim_times.push_back(time_one(
                [](auto&&... args) { return simulate(std::forward<decltype(args)>(args)...); }, target, run_seed));
            if (target <= ogata_max) {
                ogata_times.push_back(time_one(
                    [](auto&&... args) { return simulate_ogata(std::forward<decltype(args)>(args)...); }, target,
                    run_seed));
            }
        }
        const double sim = median(sim_times);
        const double ogata = ogata_times.empty() ? std::nan("") : median(ogata_times);
        const double sim_ratio = previous_sim > 0.0 ? sim / previous_sim : std::nan("");
        const double ogata_ratio = previous_ogata > 0.0 ? ogata / previous_ogata : std::nan("");
        out << target << ',' << io::format_double(sim) << ',' << io::format_double(ogata) << ','
            << io::format_double(sim_ratio) << ',' << io::format_double(ogata_ratio) << '\n';
        char line[160];
        std::snprintf(line, sizeof(line), "%-8zu %12.4g %10.4g %11.3f %12.3f\n", target, sim, ogata, sim_ratio,
                      ogata_ratio);
        std::cout << line;
        previous_sim = sim;
        previous_ogata = ogata;
    }
    io::write_manifest(dir / "manifest.txt", "bench", seed, s.resolved());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hawkes processes with stochastic excitation: simulation and MCMC inference"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "0.1.0");

    const KeySpec seed_key{"seed", std::nullopt, "64-bit seed (drawn and recorded when omitted)"};
    const KeySpec out_key{"out", ".", "output directory"};
    const KeySpec threads_key{"threads", "0", "worker threads (0 = hardware concurrency)"};

    auto* simulate_cmd = app.add_subcommand("simulate", "simulate event sequences");
    Settings simulate_settings(
        simulate_cmd, concat(model_keys(), {{"horizon", std::nullopt, "observation window T"},
                                            {"replicates", "1", "independent replicates"},
                                            {"max_events", std::nullopt, "stop after this many events"},
                                            {"trace", std::nullopt, "also write the intensity trace", true},
                                            {"trace_points", "512", "uniform trace points"},
                                            seed_key, out_key, threads_key}));

    auto* infer_cmd = app.add_subcommand("infer", "fit a model to an event file by MCMC");
    Settings infer_settings(
        infer_cmd,
        concat(prior_keys(), {{"events", std::nullopt, "event CSV (header t)"},
                              {"horizon", std::nullopt, "observation window T (default: manifest.txt next to events)"},
                              {"model", std::nullopt, "constant | gamma | gbm | langevin"},
                              {"iters", "20000", "total sweeps, burn-in included"},
                              {"burnin", "5000", "burn-in sweeps"},
                              {"thin", "1", "keep every n-th draw"},
                              {"chains", "1", "independent chains"},
                              {"k_update", "exact-mh", "linearized | exact-mh | fixed"},
                              {"init", "prior", "prior | deterministic"},
                              {"y0", "1", "known initial excitation level"},
                              {"save_latent", std::nullopt, "write Y and Z draws to latent.csv", true},
                              seed_key, out_key, threads_key}));

    auto* diagnose_cmd = app.add_subcommand("diagnose", "goodness of fit, chain summaries and sampler checks");
    Settings diagnose_settings(
        diagnose_cmd,
        concat(model_keys(), {{"geweke", std::nullopt, "joint-distribution sampler test", true},
                              {"rescaling", std::nullopt, "time-rescaling KS test", true},
                              {"summary", std::nullopt, "summarize chain files", true},
                              {"renewal", std::nullopt, "expected-intensity curve", true},
                              {"rounds", "20000", "Geweke rounds"},
                              {"sweeps", "5", "sampler sweeps per Geweke round"},
                              {"geweke_horizon", "6", "Geweke observation window"},
                              {"k_update", "exact-mh", "linearized | exact-mh | fixed"},
                              {"events", std::nullopt, "event CSV"},
                              {"horizon", std::nullopt, "observation window T"},
                              {"contagion", std::nullopt, "contagion CSV (t,y)"},
                              {"chain_files", std::nullopt, "comma-separated chain CSV files"},
                              {"grid_end", "10", "renewal grid end"},
                              {"grid_points", "11", "renewal grid points"},
                              seed_key, out_key}));

    auto* em_cmd = app.add_subcommand("em-check", "compare EM responsibilities with the Gibbs branching posterior");
    Settings em_settings(em_cmd, {{"events", std::nullopt, "event CSV"},
                                  {"horizon", std::nullopt, "observation window T"},
                                  {"a", std::nullopt, "asymptotic base rate"},
                                  {"lambda0", std::nullopt, "initial base intensity"},
                                  {"delta", std::nullopt, "kernel decay rate"},
                                  {"psi", std::nullopt, "constant excitation"},
                                  out_key});

    auto* bench_cmd = app.add_subcommand("bench", "time the simulators against event count");
    Settings bench_settings(bench_cmd, {{"events", "1e3,1e4,1e5", "comma-separated expected event counts"},
                                        {"runs", "5", "runs per size (median reported)"},
                                        {"ogata_max", "1e4", "largest size timed with the thinning oracle"},
                                        seed_key, out_key});

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (simulate_cmd->parsed()) {
            simulate_settings.resolve();
            cmd_simulate(simulate_settings);
        } else if (infer_cmd->parsed()) {
            infer_settings.resolve();
            cmd_infer(infer_settings);
        } else if (diagnose_cmd->parsed()) {
            diagnose_settings.resolve();
            cmd_diagnose(diagnose_settings);
        } else if (em_cmd->parsed()) {
            em_settings.resolve();
            cmd_em_check(em_settings);
        } else if (bench_cmd->parsed()) {
            bench_settings.resolve();
            cmd_bench(bench_settings);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error [" << e.key() << "]: " << e.what() << '\n';
        return kConfigError;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDomainError;
    }
    return kOk;
}
