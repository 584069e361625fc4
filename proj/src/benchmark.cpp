#include "tvpgamp/benchmark.hpp"

#include "tvpgamp/design.hpp"
#include "tvpgamp/error.hpp"
#include "tvpgamp/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace tvpgamp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string squash(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c != '-' && c != '_') {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

bool local_level(SimKind kind) {
    return kind == SimKind::PoissonJumps || kind == SimKind::RegressionEffects ||
           kind == SimKind::RandomWalk;
}

std::vector<double> successful(const std::vector<BenchmarkRow>& rows, Estimator e) {
    std::vector<double> v;
    for (const auto& r : rows) {
        if (r.estimator == e && std::isfinite(r.ad)) {
            v.push_back(r.ad);
        }
    }
    return v;
}

double median_of(std::vector<double> v) {
    if (v.empty()) {
        return kNaN;
    }
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::string to_string(Estimator e) {
    switch (e) {
        case Estimator::Gamp:
            return "gamp";
        case Estimator::Ols:
            return "ols";
        case Estimator::OlsPerPredictor:
            return "olsPerPredictor";
        case Estimator::Lasso:
            return "lasso";
        case Estimator::Ssvs:
            return "ssvs";
    }
    return "unknown";
}

Estimator estimator_from_string(const std::string& name) {
    const auto key = squash(name);
    if (key == "gamp") {
        return Estimator::Gamp;
    }
    if (key == "ols") {
        return Estimator::Ols;
    }
    if (key == "olsperpredictor") {
        return Estimator::OlsPerPredictor;
    }
    if (key == "lasso") {
        return Estimator::Lasso;
    }
    if (key == "ssvs") {
        return Estimator::Ssvs;
    }
    throw ArgumentError("unknown estimator '" + name + "' (gamp|ols|olsPerPredictor|lasso|ssvs)");
}

std::vector<Estimator> default_estimators(SimKind kind) {
    if (kind == SimKind::SparseRegression) {
        return {Estimator::Gamp, Estimator::OlsPerPredictor, Estimator::Lasso, Estimator::Ssvs};
    }
    return {Estimator::Gamp, Estimator::Ols};
}

GampConfig default_gamp_config(SimKind kind) {
    GampConfig cfg;
    cfg.varianceMode = local_level(kind) ? VarianceMode::StochasticVolatility : VarianceMode::EmConstant;
    return cfg;
}

void BenchmarkSpec::validate() const {
    sim.validate();
    gamp.validate();
    if (reps == 0) {
        throw ArgumentError("benchmark needs at least one replication");
    }
    for (const auto e : estimators) {
        if (local_level(sim.kind) && (e == Estimator::Lasso || e == Estimator::Ssvs)) {
            throw ArgumentError("Gibbs samplers are static; not available for " + to_string(sim.kind));
        }
        if (e == Estimator::Lasso || e == Estimator::Ssvs) {
            gibbs.validate();
        }
    }
}

BenchmarkRow benchmark_one(const SimOutput& sim, Estimator estimator, const GampConfig& gamp,
                           const GibbsConfig& gibbs, std::size_t rep) {
    BenchmarkRow row;
    row.rep = rep;
    row.estimator = estimator;
    const bool tvp = sim.time_varying();
    const Matrix truth = tvp ? sim.trueCoefPath : Matrix(sim.trueCoef);
    const auto start = std::chrono::steady_clock::now();
    try {
        Matrix estimate;
        switch (estimator) {
            case Estimator::Gamp: {
                GampResult res;
                if (tvp) {
                    res = gamp_solve(build_tvp_operator(sim.X), sim.y, gamp);
                    estimate = res.path.combined;
                } else {
                    res = gamp_solve(DenseDesignOperator(sim.X), sim.y, gamp);
                    estimate = res.state.betaHat;
                }
                row.iterations = res.state.iter;
                row.converged = res.state.converged;
                break;
            }
            case Estimator::Ols: {
                const Vector b = ols(sim.X, sim.y);
                estimate = tvp ? Matrix(Matrix::Ones(sim.X.rows(), 1) * b.transpose()) : Matrix(b);
                break;
            }
            case Estimator::OlsPerPredictor: {
                const Vector b = ols_per_predictor(sim.X, sim.y);
                estimate = tvp ? Matrix(Matrix::Ones(sim.X.rows(), 1) * b.transpose()) : Matrix(b);
                break;
            }
            case Estimator::Lasso:
            case Estimator::Ssvs: {
                if (tvp) {
                    throw ArgumentError("Gibbs samplers are static");
                }
                GibbsConfig gc = gibbs;
                gc.stream = rep;
                const auto draws =
                    estimator == Estimator::Lasso ? gibbs_lasso(sim.X, sim.y, gc) : gibbs_ssvs(sim.X, sim.y, gc);
                estimate = draws.posterior_mean();
                break;
            }
        }
        row.ad = ad_statistic(estimate, truth);
    } catch (const NumericalError& e) {
        row.ad = kNaN;
        row.converged = false;
        row.note = e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

std::vector<BenchmarkRow> run_benchmark(const BenchmarkSpec& spec, std::size_t threads) {
    spec.validate();
    const auto estimators = spec.estimators.empty() ? default_estimators(spec.sim.kind) : spec.estimators;
    const std::size_t m = estimators.size();
    std::vector<BenchmarkRow> rows(spec.reps * m);
    parallel_for(spec.reps, threads, [&](std::size_t r) {
        const auto sim = simulate(spec.sim, r);
        for (std::size_t k = 0; k < m; ++k) {
            rows[r * m + k] = benchmark_one(sim, estimators[k], spec.gamp, spec.gibbs, r);
        }
    });
    return rows;
}

double median_ad(const std::vector<BenchmarkRow>& rows, Estimator estimator) {
    return median_of(successful(rows, estimator));
}

double mean_ad(const std::vector<BenchmarkRow>& rows, Estimator estimator) {
    const auto v = successful(rows, estimator);
    if (v.empty()) {
        return kNaN;
    }
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s / static_cast<double>(v.size());
}

std::size_t failure_count(const std::vector<BenchmarkRow>& rows, Estimator estimator) {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [&](const BenchmarkRow& r) {
        return r.estimator == estimator && !std::isfinite(r.ad);
    }));
}

void write_ad_csv(const std::vector<BenchmarkRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << std::setprecision(17) << "rep,estimator,ad,seconds,iterations,converged\n";
    for (const auto& r : rows) {
        out << r.rep << ',' << to_string(r.estimator) << ',' << r.ad << ',' << r.seconds << ','
            << r.iterations << ',' << (r.converged ? 1 : 0) << '\n';
    }
}

void write_timing_csv(const std::vector<BenchmarkRow>& rows, const BenchmarkSpec& spec,
                      const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    const auto estimators = spec.estimators.empty() ? default_estimators(spec.sim.kind) : spec.estimators;
    const std::size_t p = spec.sim.kind == SimKind::SparseRegression ? spec.sim.p
                          : spec.sim.kind == SimKind::Ar4           ? kAr4Coefficients.size()
                                                                    : 1;
    out << std::setprecision(17) << "estimator,T,p,reps,mean_seconds,median_seconds,median_ad,failures\n";
    for (const auto e : estimators) {
        std::vector<double> secs;
        for (const auto& r : rows) {
            if (r.estimator == e) {
                secs.push_back(r.seconds);
            }
        }
        double mean = 0.0;
        for (double s : secs) {
            mean += s;
        }
        mean = secs.empty() ? kNaN : mean / static_cast<double>(secs.size());
        out << to_string(e) << ',' << spec.sim.T << ',' << p << ',' << spec.reps << ',' << mean << ','
            << median_of(secs) << ',' << median_ad(rows, e) << ',' << failure_count(rows, e) << '\n';
    }
}

}  // namespace tvpgamp
