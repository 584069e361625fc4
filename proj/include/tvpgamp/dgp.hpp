#pragma once

#include "tvpgamp/ingest.hpp"
#include "tvpgamp/linalg.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace tvpgamp {

enum class SimKind {
    PoissonJumps,       // local level with random jumps
    RegressionEffects,  // local level driven by ten exogenous regressors
    RandomWalk,         // local level following a random walk
    SparseRegression,   // static sparse regression with Toeplitz-correlated predictors
    Ar4,                // stationary AR(4) without intercept
};

std::string to_string(SimKind kind);
/// Accepts poissonJumps|regressionEffects|randomWalk|sparseRegression|ar4
/// (case-insensitive, '-'/'_' ignored). Throws ArgumentError otherwise.
SimKind sim_kind_from_string(const std::string& name);

struct SimSpec {
    SimKind kind = SimKind::SparseRegression;
    std::size_t T = 200;
    std::size_t p = 100;         // sparse kind only
    double rho = 0.3;            // predictor correlation rho^|i-j|
    double sparsity = 0.05;      // fraction c of active predictors
    double lambda = 0.1;         // Poisson jump intensity
    bool orthogonalize = false;  // whiten predictors before generating y
    std::uint64_t seed = 0;

    void validate() const;
};

struct SimMeta {
    std::uint64_t seed = 0;
    std::uint64_t replication = 0;
    double mu = 0.0;                      // jump process level
    double c0 = 0.0;                      // random-walk start
    std::vector<int> poissonCounts;       // k_t
    std::vector<int> jumpSigns;           // sign(delta_t), +1 at delta_t = 0
    std::vector<std::size_t> jumpTimes;   // t with k_t > 0
    Vector stateNoise;                    // u_t
    Vector exogenousCoefs;                // beta_0..beta_10 (regression effects)
    Matrix exogenous;                     // z_jt, T x 10
    std::vector<std::size_t> activeSet;   // sparse kind
    std::vector<std::string> warnings;
};

/// `trueCoefPath` is T x p for the local-level kinds (p = 1, X a column of
/// ones); `trueCoef` holds the static coefficients for the other kinds.
struct SimOutput {
    SimKind kind = SimKind::SparseRegression;
    Vector y;
    Matrix X;
    Matrix trueCoefPath;
    Vector trueCoef;
    SimMeta meta;

    [[nodiscard]] bool time_varying() const noexcept { return trueCoefPath.size() > 0; }
};

inline constexpr std::array<double, 4> kAr4Coefficients{0.40, 0.22, 0.05, 0.14};
inline constexpr std::size_t kAr4BurnIn = 200;

/// Dispatches on spec.kind. Replication r draws from substream (seed, r).
SimOutput simulate(const SimSpec& spec, std::uint64_t replication = 0);

SimOutput simulate_poisson_jumps(const SimSpec& spec, std::uint64_t replication = 0);
SimOutput simulate_regression_effects(const SimSpec& spec, std::uint64_t replication = 0);
SimOutput simulate_random_walk(const SimSpec& spec, std::uint64_t replication = 0);
SimOutput simulate_sparse_regression(const SimSpec& spec, std::uint64_t replication = 0);
SimOutput simulate_ar4(const SimSpec& spec, std::uint64_t replication = 0);

/// Number of active predictors: c * p rounded to the nearest integer.
std::size_t active_count(std::size_t p, double sparsity);

/// p x p matrix with entries rho^|i-j|.
Matrix toeplitz_correlation(std::size_t p, double rho);

/// X W^{-1}, W the upper Cholesky factor of the sample covariance of X, so
/// that the result has identity sample covariance. Throws RankError when
/// T < p or the covariance is not positive definite.
Matrix orthogonalize(const Matrix& X);

/// Runs the AR recursion y_t = sum_k coefs_k y_{t-k} + eps_t from a zero state.
Vector ar_recursion(const std::vector<double>& coefs, const Vector& innovations);

/// Largest modulus among the eigenvalues of the AR companion matrix.
double companion_spectral_radius(const std::vector<double>& coefs);

/// Synthetic monthly macro panel for exercising the forecasting pipeline:
/// `nSeries` level-coded series loading on `nFactors` AR(1) factors and a
/// price index (code 6) whose monthly inflation depends on last period's
/// factors through slowly drifting coefficients.
struct MacroPanelSpec {
    std::size_t T = 300;
    std::size_t nSeries = 40;
    std::size_t nFactors = 5;
    double factorPersistence = 0.7;
    double coefDrift = 0.02;       // random-walk sd of the factor coefficients
    double inflationNoise = 0.5;   // sd of the monthly inflation shock
    std::string priceName = "CPI";
    std::uint64_t seed = 0;
};

struct MacroPanel {
    RawPanel panel;
    Matrix factors;       // T x nFactors
    Matrix coefficients;  // T x nFactors, loading of inflation on lagged factors
};

MacroPanel simulate_macro_panel(const MacroPanelSpec& spec, std::uint64_t replication = 0);

}  // namespace tvpgamp
