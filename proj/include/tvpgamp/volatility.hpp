#pragma once

#include "tvpgamp/linalg.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace tvpgamp {

struct MixtureComponent {
    double weight;
    double mean;
    double variance;
};

/// Seven-component normal mixture approximating the log chi-square(1) density.
struct MixtureTable {
    std::array<MixtureComponent, 7> components;

    [[nodiscard]] double weight_sum() const noexcept;
    /// sum_i pi_i mu_i
    [[nodiscard]] double weighted_mean() const noexcept;

    /// Kim, Shephard and Chib (1998) values.
    static const MixtureTable& standard();
};

enum class SvEstimator {
    Damped,        // exp( sum_i pi_i (ytilde - mu_i) / 7 )
    WeightedMean,  // exp( ytilde - sum_i pi_i mu_i )
};

struct VolatilityPath {
    Vector sigma2;        // per-observation variance
    Vector logResiduals;  // log(r_t^2 + 1e-10)
};

inline constexpr double kLogSquareOffset = 1e-10;

/// Mixture-approximation volatility estimate from regression residuals.
VolatilityPath sv_update(const Vector& residuals, const MixtureTable& table = MixtureTable::standard(),
                         SvEstimator estimator = SvEstimator::Damped);

/// Posterior-mode update of a constant variance under an inverse-Gamma(c1, c2)
/// prior: (2 c2 + sum r_t^2) / (T + 2 c1 - 2). Throws ArgumentError when the
/// denominator is not positive.
double em_constant_variance(const Vector& residuals, double c1 = 0.01, double c2 = 0.01);

/// Writes `date,sigma2` rows (dates default to 1-based indices).
void write_volatility_csv(const VolatilityPath& path, const std::filesystem::path& file,
                          const std::vector<std::string>& dates = {});

}  // namespace tvpgamp
