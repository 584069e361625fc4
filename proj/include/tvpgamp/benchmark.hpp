#pragma once

#include "tvpgamp/dgp.hpp"
#include "tvpgamp/gamp.hpp"
#include "tvpgamp/oracles.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace tvpgamp {

enum class Estimator {
    Gamp,
    Ols,              // joint least squares; constant fit for the local-level kinds
    OlsPerPredictor,  // one regression per column
    Lasso,
    Ssvs,
};

std::string to_string(Estimator e);
Estimator estimator_from_string(const std::string& name);

/// gamp + ols for AR(4) and the local-level kinds; gamp, per-predictor OLS,
/// lasso and ssvs for the sparse regression.
std::vector<Estimator> default_estimators(SimKind kind);

/// Constant variance (EM) for the static kinds, stochastic volatility for the
/// local-level kinds.
GampConfig default_gamp_config(SimKind kind);

struct BenchmarkSpec {
    SimSpec sim;
    std::size_t reps = 100;
    std::vector<Estimator> estimators;  // empty: default_estimators(sim.kind)
    GampConfig gamp;
    GibbsConfig gibbs;

    void validate() const;
};

struct BenchmarkRow {
    std::size_t rep = 0;
    Estimator estimator = Estimator::Gamp;
    double ad = 0.0;  // NaN when the fit failed
    double seconds = 0.0;
    std::size_t iterations = 0;  // GAMP only
    bool converged = true;
    std::string note;
};

/// AD of one estimator on one simulated data set. For the local-level kinds
/// the deviation is taken over the whole T x 1 coefficient path.
BenchmarkRow benchmark_one(const SimOutput& sim, Estimator estimator, const GampConfig& gamp,
                           const GibbsConfig& gibbs, std::size_t rep);

/// Simulates spec.reps data sets and scores every estimator on each. Rows are
/// ordered by replication, then by estimator, whatever the thread count.
/// Gibbs replication r uses stream r of spec.gibbs.seed.
std::vector<BenchmarkRow> run_benchmark(const BenchmarkSpec& spec, std::size_t threads = 1);

/// Median / mean AD of the successful rows of one estimator (NaN if none).
double median_ad(const std::vector<BenchmarkRow>& rows, Estimator estimator);
double mean_ad(const std::vector<BenchmarkRow>& rows, Estimator estimator);
std::size_t failure_count(const std::vector<BenchmarkRow>& rows, Estimator estimator);

void write_ad_csv(const std::vector<BenchmarkRow>& rows, const std::filesystem::path& path);
/// One line per estimator: T, p, reps, mean/median seconds, median AD, failures.
void write_timing_csv(const std::vector<BenchmarkRow>& rows, const BenchmarkSpec& spec,
                      const std::filesystem::path& path);

}  // namespace tvpgamp
