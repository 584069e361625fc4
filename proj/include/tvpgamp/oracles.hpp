#pragma once

#include "tvpgamp/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>

namespace tvpgamp {

/// Joint least squares (X'X)^{-1} X'y. Throws RankError when X'X is singular.
Vector ols(const Matrix& X, const Vector& y);

/// Regresses y on each column alone (no intercept): x_j'y / x_j'x_j.
/// Throws RankError for an all-zero column.
Vector ols_per_predictor(const Matrix& X, const Vector& y);

struct GaussianPosterior {
    Vector mean;
    Vector variance;  // diagonal of the posterior covariance
};

inline constexpr Eigen::Index kExactPosteriorMaxColumns = 2000;

/// Mean (X'X/s2 + diag(alpha))^{-1} X'y/s2 and the diagonal of the inverse.
/// Guarded to at most kExactPosteriorMaxColumns columns.
GaussianPosterior exact_gaussian_posterior(const Matrix& X, const Vector& y, const Vector& alpha,
                                           double sigma2);

struct LassoSettings {
    double r = 1.0;      // Gamma shape on lambda^2
    double delta = 3.0;  // Gamma rate on lambda^2
};

struct SsvsSettings {
    double pi0 = 0.5;  // prior inclusion probability
    double tau0 = 0.001;
    double tau1 = 4.0;
};

struct GibbsConfig {
    std::size_t nSave = 2000;
    std::size_t nBurn = 1000;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    LassoSettings lasso;
    SsvsSettings ssvs;

    void validate() const;
};

struct PosteriorDraws {
    Matrix beta;       // nSave x p
    Vector sigma2;     // nSave
    Matrix inclusion;  // nSave x p of 0/1, SSVS only
    Vector lambda2;    // nSave, LASSO only

    [[nodiscard]] Vector posterior_mean() const { return beta.colwise().mean().transpose(); }
    [[nodiscard]] Vector inclusion_rate() const {
        return inclusion.colwise().mean().transpose();
    }
};

/// Bayesian LASSO sampler cycling beta, 1/tau_j^2 (inverse Gaussian),
/// lambda^2 and sigma^2. Throws ArgumentError when T <= 2.
PosteriorDraws gibbs_lasso(const Matrix& X, const Vector& y, const GibbsConfig& cfg);

/// SSVS sampler cycling beta, the inclusion indicators and sigma^2.
PosteriorDraws gibbs_ssvs(const Matrix& X, const Vector& y, const GibbsConfig& cfg);

/// Probability that gamma_i = 1 given beta_i, evaluated in log space.
double ssvs_inclusion_probability(double beta, const SsvsSettings& s);

/// Mean absolute deviation over all entries. Throws ArgumentError on a shape
/// mismatch or empty input.
double ad_statistic(const Matrix& estimate, const Matrix& truth);

void write_draws_csv(const PosteriorDraws& draws, const std::filesystem::path& path);

}  // namespace tvpgamp
