#include "stochhawkes/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <type_traits>

#include "stochhawkes/model.hpp"

namespace stochhawkes {

namespace {

constexpr std::size_t kMinRescalingEvents = 50;

double stephens_scale(double n) {
    const double root = std::sqrt(n);
    return root + 0.12 + 0.11 / root;
}

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance_of(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size() - 1);
}

}  // namespace

double kolmogorov_survival(double x) {
    if (!(x > 0.0)) return 1.0;
    if (x < 1.18) {
        // Jacobi-theta form, converges fast for small x.
        const double factor = std::sqrt(2.0 * std::numbers::pi) / x;
        const double w = std::numbers::pi * std::numbers::pi / (8.0 * x * x);
        double sum = 0.0;
        for (int k = 1; k <= 50; ++k) {
            const double odd = 2.0 * k - 1.0;
            const double term = std::exp(-odd * odd * w);
            sum += term;
            if (term < 1e-17 * sum) break;
        }
        return std::clamp(1.0 - factor * sum, 0.0, 1.0);
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1 ? 1.0 : -1.0) * term;
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test_exponential(std::vector<double> values) {
    if (values.empty()) {
        throw InsufficientData("KS test needs at least one value");
    }
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double cdf = values[i] <= 0.0 ? 0.0 : -std::expm1(-values[i]);
        d = std::max({d, cdf - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - cdf});
    }
    return {d, kolmogorov_survival(stephens_scale(n) * d), values.size()};
}

KsResult ks_test_two_sample(std::vector<double> x, std::vector<double> y) {
    if (x.empty() || y.empty()) {
        throw InsufficientData("two-sample KS test needs two non-empty samples");
    }
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    const double effective = nx * ny / (nx + ny);
    return {d, kolmogorov_survival(stephens_scale(effective) * d), x.size() + y.size()};
}

std::vector<double> rescaled_gaps(const EventSequence& events, std::span<const double> y, const HawkesParams& params) {
    const auto compensator = compensator_at_events(events, y, params);
    std::vector<double> gaps(compensator.size());
    double previous = 0.0;
    for (std::size_t i = 0; i < compensator.size(); ++i) {
        gaps[i] = compensator[i] - previous;
        previous = compensator[i];
    }
    return gaps;
}

KsResult time_rescaling_test(const EventSequence& events, std::span<const double> y, const HawkesParams& params) {
    if (events.size() < kMinRescalingEvents) {
        throw InsufficientData("time-rescaling test needs at least 50 events, got " + std::to_string(events.size()));
    }
    return ks_test_exponential(rescaled_gaps(events, y, params));
}

MeanExcitation mean_excitation(const SdeSpec& spec) {
    spec.validate();
    const double y0 = spec.y0;
    return std::visit(
        [y0](const auto& law) -> MeanExcitation {
            using Law = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<Law, ConstantLaw>) {
                return [psi = law.psi](double) { return psi; };
            } else if constexpr (std::is_same_v<Law, IidGammaLaw>) {
                return [m = law.shape / law.rate](double) { return m; };
            } else if constexpr (std::is_same_v<Law, GbmLaw>) {
                return [y0, growth = law.mu + 0.5 * law.sigma2](double t) { return y0 * std::exp(growth * t); };
            } else {
                return [y0, law](double t) {
                    const double phi = std::exp(-law.k * t);
                    const double mean = phi * std::log(y0) - law.mu * std::expm1(-law.k * t);
                    const double var = -law.sigma2 * std::expm1(-2.0 * law.k * t) / (2.0 * law.k);
                    return std::exp(mean + 0.5 * var);
                };
            }
        },
        spec.law);
}

std::vector<double> expected_intensity_curve(const HawkesParams& params, const MeanExcitation& mean_y,
                                             std::span<const double> grid) {
    params.validate();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || grid[i] < 0.0 || (i > 0 && !(grid[i] > grid[i - 1]))) {
            throw std::invalid_argument("expected_intensity_curve: grid must be non-negative and strictly increasing");
        }
    }
    if (grid.empty()) return {};

    const auto rhs = [&](double t, double m) { return params.delta * (params.a - m) + mean_y(t) * m; };
    const auto solve = [&](std::size_t substeps) {
        std::vector<double> out(grid.size());
        double t = 0.0;
        double m = params.lambda0;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const double h = (grid[g] - t) / static_cast<double>(substeps);
            if (h > 0.0) {
                for (std::size_t s = 0; s < substeps; ++s) {
                    const double k1 = rhs(t, m);
                    const double k2 = rhs(t + 0.5 * h, m + 0.5 * h * k1);
                    const double k3 = rhs(t + 0.5 * h, m + 0.5 * h * k2);
                    const double k4 = rhs(t + h, m + h * k3);
                    m += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
                    t += h;
                }
            }
            t = grid[g];
            out[g] = m;
        }
        return out;
    };

    constexpr std::size_t kMaxSteps = std::size_t{1} << 20;
    std::size_t substeps = std::max<std::size_t>(1, 64 / grid.size());
    auto previous = solve(substeps);
    while (substeps * 2 * grid.size() <= kMaxSteps) {
        substeps *= 2;
        auto current = solve(substeps);
        double diff = 0.0;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            diff = std::max(diff, std::abs(current[g] - previous[g]) / std::max(1.0, std::abs(current[g])));
        }
        if (!std::isfinite(diff)) {
            throw NumericalError("expected_intensity_curve: solution is not finite");
        }
        previous = std::move(current);
        if (diff < 1e-8) return previous;
    }
    throw NumericalError("expected_intensity_curve: step refinement did not converge within 2^20 steps");
}

double effective_sample_size(std::span<const double> draws) {
    const std::size_t n = draws.size();
    if (n < 4) return static_cast<double>(n);
    const double m = mean_of(draws);
    const auto autocov = [&](std::size_t lag) {
        double s = 0.0;
        for (std::size_t t = 0; t + lag < n; ++t) s += (draws[t] - m) * (draws[t + lag] - m);
        return s / static_cast<double>(n);
    };
    const double gamma0 = autocov(0);
    if (!(gamma0 > 0.0)) return 1.0;

    double sum = 0.0;  // sum of the positive, monotone pair sums
    double last_pair = std::numeric_limits<double>::infinity();
    for (std::size_t lag = 0; lag + 1 < n; lag += 2) {
        double pair = autocov(lag) + autocov(lag + 1);
        if (!(pair > 0.0)) break;
        pair = std::min(pair, last_pair);
        sum += pair;
        last_pair = pair;
    }
    const double tau = -1.0 + 2.0 * sum / gamma0;
    return static_cast<double>(n) / std::max(tau, 1e-12);
}

double split_rhat(const std::vector<std::vector<double>>& chains) {
    std::size_t length = std::numeric_limits<std::size_t>::max();
    for (const auto& c : chains) length = std::min(length, c.size());
    if (chains.empty() || length < 4) {
        throw InsufficientData("split R-hat needs chains with at least 4 draws");
    }
    const std::size_t half = length / 2;
    std::vector<double> means;
    std::vector<double> variances;
    for (const auto& c : chains) {
        for (std::size_t part = 0; part < 2; ++part) {
            const std::span<const double> piece(c.data() + (part == 0 ? 0 : length - half), half);
            means.push_back(mean_of(piece));
            variances.push_back(variance_of(piece));
        }
    }
    const double w = mean_of(variances);
    const double b = static_cast<double>(half) * variance_of(means);
    if (!(w > 0.0)) return b > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    const double h = static_cast<double>(half);
    return std::sqrt(((h - 1.0) / h * w + b / h) / w);
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw InsufficientData("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<ParameterSummary> chain_summary(const std::vector<Chain>& chains) {
    if (chains.empty() || chains.front().states.empty()) {
        throw InsufficientData("chain summary needs at least one non-empty chain");
    }
    const auto names = chains.front().parameter_names();
    std::vector<ParameterSummary> out;
    for (const auto& name : names) {
        ParameterSummary s;
        s.name = name;
        std::vector<std::vector<double>> per_chain;
        std::vector<double> pooled;
        for (const auto& c : chains) {
            per_chain.push_back(c.parameter(name));
            pooled.insert(pooled.end(), per_chain.back().begin(), per_chain.back().end());
        }
        s.mean = mean_of(pooled);
        s.sd = std::sqrt(variance_of(pooled));
        s.median = quantile(pooled, 0.5);
        s.q05 = quantile(pooled, 0.05);
        s.q95 = quantile(pooled, 0.95);
        s.degenerate = !(s.sd > 0.0);
        if (s.degenerate) {
            s.ess = 1.0;
        } else {
            for (const auto& draws : per_chain) s.ess += effective_sample_size(draws);
        }
        std::size_t shortest = per_chain.front().size();
        for (const auto& d : per_chain) shortest = std::min(shortest, d.size());
        s.rhat = shortest >= 4 ? split_rhat(per_chain) : std::numeric_limits<double>::quiet_NaN();
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<ParameterSummary> chain_summary(const Chain& chain) { return chain_summary(std::vector<Chain>{chain}); }

}  // namespace stochhawkes
