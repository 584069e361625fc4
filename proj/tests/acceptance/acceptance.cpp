// Acceptance checks. Prints one PASS/FAIL line per criterion plus "info"
// lines with the measured quantities. Exit status is 0 unless a check could
// not be run at all; pass --strict to exit 1 on any FAIL.

#include "tvpgamp/benchmark.hpp"
#include "tvpgamp/design.hpp"
#include "tvpgamp/dgp.hpp"
#include "tvpgamp/forecast.hpp"
#include "tvpgamp/gamp.hpp"
#include "tvpgamp/oracles.hpp"
#include "tvpgamp/parallel.hpp"
#include "tvpgamp/volatility.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <string>
#include <vector>

using namespace tvpgamp;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void verdict(int id, bool ok, const std::string& what) {
    std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", what.c_str());
    std::fflush(stdout);
    if (!ok) {
        ++failures;
    }
}

void info(int id, const std::string& what) {
    std::printf("  info %2d: %s\n", id, what.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

template <class... A>
std::string fmtn(const char* f, A... a) {
    char buf[320];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

double mean_seconds(const std::vector<BenchmarkRow>& rows, Estimator e) {
    double total = 0.0;
    std::size_t n = 0;
    for (const auto& r : rows) {
        if (r.estimator == e) {
            total += r.seconds;
            ++n;
        }
    }
    return n ? total / static_cast<double>(n) : NAN;
}

void c1() {
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> logv(std::log(1e-6), std::log(1e6));
    std::normal_distribution<double> z(0.0, 10.0);
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const double c = z(g);
        const double tc = std::exp(logv(g));
        const double y = z(g);
        const double s2 = std::exp(logv(g));
        const auto a = gamp_output_step(c, tc, y, s2);
        const double sRef = (y - c) / (s2 + tc);
        const double tRef = 1.0 / (s2 + tc);
        if (sRef != 0.0) {
            worst = std::max(worst, std::abs(a.sHat - sRef) / std::abs(sRef));
        }
        worst = std::max(worst, std::abs(a.tauS - tRef) / tRef);
    }
    const double secs = since(t0);
    verdict(1, worst < 1e-12 && secs < 1.0,
            fmtn("max relative error %.3g (< 1e-12), %.3f s (< 1 s)", worst, secs));
}

void c2() {
    SimSpec s;
    s.T = 100;
    s.p = 50;
    s.rho = 0.3;
    s.sparsity = 0.1;
    s.seed = 42;
    const auto d = simulate(s);
    bool ok = true;
    for (double alpha : {0.1, 1.0, 10.0}) {
        GampConfig cfg;
        cfg.updateAlpha = false;
        cfg.alphaInit = alpha;
        cfg.varianceMode = VarianceMode::KnownConstant;
        cfg.sigma2 = 1.0;
        cfg.tol = 1e-12;
        cfg.maxIter = 10000;
        const auto t0 = Clock::now();
        const auto res = gamp_solve(DenseDesignOperator(d.X), d.y, cfg);
        const double secs = since(t0);
        const auto exact = exact_gaussian_posterior(d.X, d.y, Vector::Constant(50, alpha), 1.0);
        const double rel = (res.state.betaHat - exact.mean).norm() / exact.mean.norm();
        const bool pass = res.state.converged && rel < 1e-6 && secs < 0.5;
        ok = ok && pass;
        info(2, fmtn("alpha %.1f: relative error %.3g, %zu iterations, %.4f s", alpha, rel, res.state.iter, secs));
    }
    verdict(2, ok, "GAMP mean equals the exact Gaussian posterior mean to 1e-6, each solve < 0.5 s");
}

std::vector<BenchmarkRow> c3_rows(std::size_t threads) {
    BenchmarkSpec spec;
    spec.sim.kind = SimKind::SparseRegression;
    spec.sim.T = 50;
    spec.sim.p = 100;
    spec.sim.sparsity = 0.01;
    spec.sim.rho = 0.3;
    spec.sim.seed = 2024;
    spec.reps = 100;
    spec.estimators = {Estimator::Gamp, Estimator::OlsPerPredictor};
    spec.gamp = default_gamp_config(SimKind::SparseRegression);
    return run_benchmark(spec, threads);
}

std::vector<BenchmarkRow> c3() {
    const auto t0 = Clock::now();
    const auto rows = c3_rows(1);
    const double secs = since(t0);
    const double g = median_ad(rows, Estimator::Gamp);
    const double o = median_ad(rows, Estimator::OlsPerPredictor);
    verdict(3, o / g >= 5.0 && secs < 30.0,
            fmtn("median AD gamp %.4f, per-predictor OLS %.4f, ratio %.2f (>= 5), %.2f s (< 30 s)", g, o, o / g,
                 secs));

    for (auto mode : {VarianceMode::StochasticVolatility, VarianceMode::KnownConstant}) {
        BenchmarkSpec spec;
        spec.sim.T = 50;
        spec.sim.p = 100;
        spec.sim.sparsity = 0.01;
        spec.sim.rho = 0.3;
        spec.sim.seed = 2024;
        spec.reps = 100;
        spec.estimators = {Estimator::Gamp, Estimator::OlsPerPredictor};
        spec.gamp.varianceMode = mode;
        const auto alt = run_benchmark(spec);
        const double ga = median_ad(alt, Estimator::Gamp);
        info(3, fmtn("%s variance: median AD gamp %.4f, ratio %.2f, %zu gamp failures",
                     mode == VarianceMode::KnownConstant ? "known unit" : "stochastic", ga,
                     median_ad(alt, Estimator::OlsPerPredictor) / ga, failure_count(alt, Estimator::Gamp)));
    }
    return rows;
}

void c4() {
    BenchmarkSpec spec;
    spec.sim.T = 200;
    spec.sim.p = 100;
    spec.sim.sparsity = 0.05;
    spec.sim.rho = 0.3;
    spec.sim.seed = 77;
    spec.reps = 50;
    spec.estimators = {Estimator::Gamp, Estimator::Lasso, Estimator::Ssvs};
    spec.gamp = default_gamp_config(SimKind::SparseRegression);
    spec.gibbs.seed = 77;
    const auto rows = run_benchmark(spec);
    const double g = median_ad(rows, Estimator::Gamp);
    const double l = median_ad(rows, Estimator::Lasso);
    const double s = median_ad(rows, Estimator::Ssvs);
    const double gt = mean_seconds(rows, Estimator::Gamp);
    const auto within = [](double a, double b) { return a <= 2.0 * b && b <= 2.0 * a; };
    info(4, fmtn("Gibbs mean seconds per replication: lasso %.2f, ssvs %.2f", mean_seconds(rows, Estimator::Lasso),
                 mean_seconds(rows, Estimator::Ssvs)));
    verdict(4, within(g, l) && within(g, s) && gt < 0.1,
            fmtn("median AD gamp %.4f, lasso %.4f (ratio %.2f), ssvs %.4f (ratio %.2f), within 2x required; gamp "
                 "%.4f s per replication (< 0.1 s)",
                 g, l, g / l, s, g / s, gt));
}

void c5() {
    BenchmarkSpec spec;
    spec.sim.kind = SimKind::Ar4;
    spec.sim.T = 500;
    spec.sim.seed = 5;
    spec.reps = 200;
    spec.estimators = {Estimator::Gamp, Estimator::Ols};
    spec.gamp = default_gamp_config(SimKind::Ar4);
    const auto rows = run_benchmark(spec);
    const double g = median_ad(rows, Estimator::Gamp);
    const double o = median_ad(rows, Estimator::Ols);
    verdict(5, std::abs(g - o) < 0.02 && failure_count(rows, Estimator::Gamp) == 0,
            fmtn("median AD gamp %.4f, OLS %.4f, |difference| %.4f (< 0.02), %zu gamp failures", g, o,
                 std::abs(g - o), failure_count(rows, Estimator::Gamp)));
}

void c6() {
    BenchmarkSpec spec;
    spec.sim.kind = SimKind::RandomWalk;
    spec.sim.T = 200;
    spec.sim.seed = 1;
    spec.reps = 200;
    spec.estimators = {Estimator::Gamp, Estimator::Ols};
    spec.gamp = default_gamp_config(SimKind::RandomWalk);
    const auto rows = run_benchmark(spec);
    const double g = mean_ad(rows, Estimator::Gamp);
    const double o = mean_ad(rows, Estimator::Ols);
    std::size_t wins = 0;
    for (std::size_t r = 0; r < spec.reps; ++r) {
        wins += rows[2 * r].ad < rows[2 * r + 1].ad;
    }
    info(6, fmtn("gamp below constant OLS in %zu of %zu replications", wins, spec.reps));
    verdict(6, g < o && failure_count(rows, Estimator::Gamp) == 0,
            fmtn("mean path AD gamp %.4f < constant OLS %.4f", g, o));
}

void c7() {
    const auto& tab = MixtureTable::standard();
    const double wsum = tab.weight_sum();
    const double target = std::exp(-tab.weighted_mean() / 7.0);
    const auto unit = sv_update(Vector::Ones(5));
    const double unitErr = (unit.sigma2.array() - target).abs().maxCoeff();
    std::mt19937_64 g(7);
    std::normal_distribution<double> z;
    Vector r(10000);
    for (Eigen::Index t = 0; t < r.size(); ++t) {
        r(t) = z(g);
    }
    const double mean = sv_update(r).sigma2.mean();
    verdict(7, std::abs(wsum - 1.0) <= 1e-5 && unitErr < 1e-3 && mean >= 0.5 && mean <= 2.0,
            fmtn("weight sum %.6f, unit-residual error %.3g (< 1e-3), mean variance on N(0,1) %.4f (in [0.5, 2])",
                 wsum, unitErr, mean));
}

void c8() {
    double perIter[3] = {0, 0, 0};
    const std::size_t ps[3] = {50, 100, 200};
    for (int k = 0; k < 3; ++k) {
        SimSpec s;
        s.T = 200;
        s.p = ps[k];
        s.sparsity = 0.05;
        s.seed = 8;
        const auto d = simulate(s);
        const auto op = build_tvp_operator(d.X);
        GampConfig cfg;
        cfg.maxIter = 30;
        cfg.tol = 1e-300;
        double best = INFINITY;
        for (int rep = 0; rep < 3; ++rep) {
            const auto t0 = Clock::now();
            const auto res = gamp_solve(op, d.y, cfg);
            best = std::min(best, since(t0) / static_cast<double>(res.state.iter));
        }
        perIter[k] = best;
        info(8, fmtn("T=200 p=%zu: %.3g s per iteration", ps[k], best));
    }
    const double r1 = perIter[1] / perIter[0];
    const double r2 = perIter[2] / perIter[1];

    SimSpec s;
    s.T = 200;
    s.p = 40;
    s.sparsity = 0.05;
    s.seed = 8;
    const auto d = simulate(s);
    GampConfig cfg;
    // iteration cap sized to the time budget
    cfg.maxIter = static_cast<std::size_t>(2.0 / perIter[0]);
    const auto t0 = Clock::now();
    const auto res = gamp_solve(build_tvp_operator(d.X), d.y, cfg);
    const double secs = since(t0);
    verdict(8, r1 <= 2.5 && r2 <= 2.5 && res.state.converged && secs < 2.0,
            fmtn("scaling %.2fx and %.2fx per doubling of p (<= 2.5); T=200 p=40 solve %s after %zu iterations in "
                 "%.2f s (< 2 s, converged required)",
                 r1, r2, res.state.converged ? "converged" : "not converged", res.state.iter, secs));
    if (!res.state.converged && !res.trace.empty()) {
        info(8, fmt("final max |change in beta| %.3g against tol 1e-6", res.trace.back().maxDelta));
    }
}

struct C9Run {
    std::vector<ForecastRecord> h1;
};

ForecastData c9_data() {
    MacroPanelSpec ms;
    ms.T = 300;
    ms.nFactors = 5;
    ms.seed = 9;
    return prepare_forecast_data(simulate_macro_panel(ms).panel, ms.priceName);
}

ForecastSpec c9_spec(int h) {
    ForecastSpec s;
    s.horizon = h;
    s.nFactors = 5;
    s.holdoutFraction = 0.5;
    return s;
}

C9Run c9() {
    const auto data = c9_data();
    GampConfig cfg;
    C9Run out;
    bool ok = true;
    for (int h : {1, 12}) {
        auto spec = c9_spec(h);
        const auto t0 = Clock::now();
        const auto tvp = run_recursive(data, spec, cfg);
        const double secs = since(t0);
        spec.model = ForecastModel::Ar2Benchmark;
        const auto ar = run_recursive(data, spec, cfg);
        const auto rep = evaluate(tvp, ar, h);
        const bool finite = std::isfinite(rep.msfe) && std::isfinite(rep.msfeRelativeToAr2) &&
                            std::isfinite(rep.logApl) && std::isfinite(rep.logAplSpreadVsAr2) &&
                            std::isfinite(rep.dmStatistic);
        ok = ok && finite && rep.msfeRelativeToAr2 < 1.1;
        info(9, fmtn("h=%d: relative MSFE %.3f, log APL spread %.3f, DM %.2f, %zu evaluated, %zu flagged, %.1f s", h,
                     rep.msfeRelativeToAr2, rep.logAplSpreadVsAr2, rep.dmStatistic, rep.nEvaluated, rep.nFlagged,
                     secs));
        if (h == 1) {
            out.h1 = tvp;
        }
    }

    // no look-ahead at five random origins
    std::mt19937_64 g(99);
    const auto origins = holdout_origins(data.price.size(), c9_spec(1));
    bool exact = true;
    for (int k = 0; k < 5; ++k) {
        const auto t = origins[std::uniform_int_distribution<std::size_t>(0, origins.size() - 1)(g)];
        const auto full = forecast_at_origin(data, c9_spec(1), cfg, t);
        const auto cut = forecast_at_origin(truncate(data, t + 1), c9_spec(1), cfg, t);
        exact = exact && full.pointForecast == cut.pointForecast &&
                full.predictiveVariance == cut.predictiveVariance;
    }
    info(9, std::string("no-look-ahead audit at 5 origins: ") + (exact ? "bit-exact" : "MISMATCH"));
    verdict(9, ok && exact, "pipeline complete, metrics finite, relative MSFE < 1.1 at h=1 and h=12, no look-ahead");
    return out;
}

void c10(const std::vector<BenchmarkRow>& c3Serial, const C9Run& c9Serial) {
    const std::size_t n = std::max<std::size_t>(4, default_threads());
    const auto par = c3_rows(n);
    bool same = par.size() == c3Serial.size();
    for (std::size_t i = 0; same && i < par.size(); ++i) {
        same = (par[i].ad == c3Serial[i].ad || (std::isnan(par[i].ad) && std::isnan(c3Serial[i].ad))) &&
               par[i].iterations == c3Serial[i].iterations;
    }
    const auto f = run_recursive(c9_data(), c9_spec(1), GampConfig{}, n);
    bool sameF = f.size() == c9Serial.h1.size();
    for (std::size_t i = 0; sameF && i < f.size(); ++i) {
        sameF = f[i].pointForecast == c9Serial.h1[i].pointForecast &&
                f[i].predictiveVariance == c9Serial.h1[i].predictiveVariance;
    }
    verdict(10, same && sameF,
            fmtn("threads 1 vs %zu: benchmark ADs %s, forecasts %s", n, same ? "identical" : "DIFFER",
                 sameF ? "identical" : "DIFFER"));
}

}  // namespace

int main(int argc, char** argv) {
    const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
    const auto t0 = Clock::now();
    try {
        c1();
        c2();
        const auto c3Rows = c3();
        c4();
        c5();
        c6();
        c7();
        c8();
        const auto c9Run = c9();
        c10(c3Rows, c9Run);
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        return 2;
    }
    std::printf("summary: %d of 10 criteria failed, %.1f s\n", failures, since(t0));
    return strict && failures > 0 ? 1 : 0;
}
