#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace stochhawkes {

/// Seeded random source. Child streams are derived from (seed, stream id) with a
/// splitmix64 counter hash, so every block of a run owns an independent, reproducible
/// stream regardless of how many draws other blocks consume.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

    Rng split(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }
    std::uint64_t seed() const noexcept { return seed_; }

    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }
    double exponential(double rate);
    /// Gamma with shape-rate parameterization.
    double gamma(double shape, double rate);
    /// Inverse gamma: 1/X with X ~ Gamma(shape, rate = scale).
    double inverse_gamma(double shape, double scale);
    /// Index drawn proportionally to non-negative weights summing to `total`.
    std::size_t categorical(std::span<const double> weights, double total);

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace stochhawkes
