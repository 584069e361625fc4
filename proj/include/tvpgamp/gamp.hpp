#pragma once

#include "tvpgamp/design.hpp"
#include "tvpgamp/linalg.hpp"
#include "tvpgamp/volatility.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

namespace tvpgamp {

enum class AlphaUpdateMode {
    GammaMode,  // (2a - 1) / (2b + beta^2): Gamma mode, negative for a < 1/2
    Mean,       // (2a + 1) / (2b + beta^2 + tau): Gamma posterior mean
};

enum class VarianceMode {
    KnownConstant,
    EmConstant,
    StochasticVolatility,
};

struct GampConfig {
    double a = 1e-10;  // Gamma shape on each prior precision
    double b = 1e-10;  // Gamma rate
    std::size_t maxIter = 1000;
    double tol = 1e-6;      // on max_i |beta_i(r) - beta_i(r-1)|
    double damping = 0.9;   // new <- damping * new + (1 - damping) * old
    double alphaMin = 1e-8;
    double alphaMax = 1e12;
    AlphaUpdateMode alphaUpdateMode = AlphaUpdateMode::Mean;
    bool updateAlpha = true;  // false keeps alphaInit fixed (exact Gaussian prior)
    double alphaInit = 0.01;
    double tauBetaInit = 100.0;
    VarianceMode varianceMode = VarianceMode::StochasticVolatility;
    double sigma2 = 1.0;  // known variance, and the starting value otherwise
    double c1 = 0.01;     // inverse-Gamma prior for the constant-variance update
    double c2 = 0.01;
    SvEstimator svEstimator = SvEstimator::Damped;
    std::vector<Eigen::Index> noShrinkColumns;  // diffuse prior, alpha pinned at alphaMin
    double divergenceThreshold = 1e10;
    std::optional<std::filesystem::path> tracePath;

    /// Throws ArgumentError on inconsistent settings.
    void validate() const;
};

/// Message quantities of one solve. Vectors indexed by t have length T,
/// those indexed by i have length q.
struct GampState {
    Vector betaHat;
    Vector tauBeta;
    Vector sHat;
    Vector tauS;
    Vector cHat;
    Vector tauC;
    Vector zHat;
    Vector tauZ;
    Vector dHat;
    Vector precD;
    Vector alpha;
    Vector sigma2;
    std::size_t iter = 0;
    bool converged = false;
};

struct OutputMessages {
    double zHat;
    double tauZ;
    double sHat;
    double tauS;
};

/**
 * Gaussian output channel for one observation.
 *
 *   tauZ = tauC s2 / (tauC + s2)        zHat = tauZ (y / s2 + cHat / tauC)
 *   sHat = (zHat - cHat) / tauC         tauS = (1 - tauZ / tauC) / tauC
 *
 * The chain is evaluated in binary128 and rounded once at the end: the two
 * subtractions cancel catastrophically in double when tauC and s2 are many
 * orders apart. Throws NumericalError unless both variances are positive.
 */
OutputMessages gamp_output_step(double cHat, double tauC, double y, double sigma2);

/// Same messages from the reduced expressions sHat = (y - cHat) / (s2 + tauC),
/// tauS = 1 / (s2 + tauC), zHat = (tauC y + s2 cHat) / (tauC + s2). Cheap and
/// free of cancellation; this is what the solver loop evaluates.
OutputMessages gamp_output_step_reduced(double cHat, double tauC, double y, double sigma2);

struct InputMessages {
    double betaHat;
    double tauBeta;
};

/// Gaussian prior N(0, 1/alpha) times Gaussian pseudo-likelihood N(dHat, 1/precD).
InputMessages gamp_input_step(double dHat, double precD, double alpha);

/// EM update of one prior precision, clamped to [alphaMin, alphaMax].
double em_alpha_update(double betaHat, double tauBeta, const GampConfig& cfg);

struct TraceRow {
    std::size_t iteration;
    double maxDelta;
    double residualSS;
};

struct GampResult {
    GampState state;
    CoefficientPath path;
    VolatilityPath volatility;
    std::vector<TraceRow> trace;
};

/**
 * Runs the message-passing iterations until the coefficient change falls
 * below cfg.tol or cfg.maxIter is reached (then `converged` is false).
 *
 * A TvpDesignOperator yields the reconstructed coefficient path; any other
 * operator yields a constant path. Throws DivergenceError when the estimate
 * turns non-finite or exceeds cfg.divergenceThreshold in magnitude.
 */
GampResult gamp_solve(const DesignOperator& A, const Vector& y, const GampConfig& cfg);

void write_trace_csv(const std::vector<TraceRow>& trace, const std::filesystem::path& path);

}  // namespace tvpgamp
