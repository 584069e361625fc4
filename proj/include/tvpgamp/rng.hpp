#pragma once

#include <cstdint>
#include <random>

namespace tvpgamp {

/// SplitMix64 finaliser (Steele, Lea and Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31U);
}

/// Seed of substream `stream` under `master`. Distinct streams never share
/// engine state, so replications can run in any order or in parallel.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

/**
 * Random source for simulation and Gibbs sampling: a 64-bit Mersenne Twister
 * seeded through derive_seed, with draws from the standard library
 * distributions. Output is reproducible bit-for-bit within one build; other
 * standard libraries match in distribution only.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : engine_(derive_seed(seed, stream)) {}

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
    double normal(double mean, double sd) { return mean + sd * normal(); }
    /// Gamma with shape k and rate (not scale).
    double gamma(double shape, double rate) {
        return std::gamma_distribution<double>(shape, 1.0 / rate)(engine_);
    }
    /// 1 / Gamma(shape, rate): inverse-Gamma with the given shape and scale.
    double inverse_gamma(double shape, double scale) { return 1.0 / gamma(shape, scale); }
    int poisson(double mean) { return std::poisson_distribution<int>(mean)(engine_); }
    bool bernoulli(double p) { return uniform() < p; }
    /// Inverse-Gaussian(mu, lambda) by Michael, Schucany and Haas (1976).
    /// mu = +inf yields the Levy limit. Throws NumericalError after 100
    /// non-finite proposals.
    double inverse_gaussian(double mu, double lambda);

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace tvpgamp
