#include "tvpgamp/cli.hpp"

#include "tvpgamp/benchmark.hpp"
#include "tvpgamp/design.hpp"
#include "tvpgamp/error.hpp"
#include "tvpgamp/parallel.hpp"
#include "tvpgamp/rng.hpp"
#include "tvpgamp/volatility.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace tvpgamp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string squash(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c != '-' && c != '_') {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

template <class T>
void take(const json& j, const char* key, T& field) {
    if (j.contains(key) && !j.at(key).is_null()) {
        field = j.at(key).get<T>();
    }
}

void take_path(const json& j, const char* key, fs::path& field) {
    if (j.contains(key) && j.at(key).is_string()) {
        field = j.at(key).get<std::string>();
    }
}

VarianceMode variance_from_string(const std::string& s, SimKind kind, bool forecasting) {
    const auto key = squash(s);
    if (key == "known" || key == "knownconstant") {
        return VarianceMode::KnownConstant;
    }
    if (key == "em" || key == "emconstant") {
        return VarianceMode::EmConstant;
    }
    if (key == "sv" || key == "stochasticvolatility") {
        return VarianceMode::StochasticVolatility;
    }
    if (key == "auto") {
        return forecasting ? VarianceMode::StochasticVolatility : default_gamp_config(kind).varianceMode;
    }
    throw ArgumentError("unknown variance mode '" + s + "' (auto|known|em|sv)");
}

std::vector<Estimator> parse_estimators(const std::string& list) {
    std::vector<Estimator> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(estimator_from_string(item));
        }
    }
    return out;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << std::setprecision(17);
    return out;
}

void write_json(const json& j, const fs::path& path) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Simulated data go to <stem>.csv (t, y, x...) and <stem>_truth.csv.
void write_sim(const SimOutput& s, const fs::path& dir, const std::string& stem) {
    {
        auto out = open_out(dir / (stem + ".csv"));
        out << "t,y";
        for (Eigen::Index j = 0; j < s.X.cols(); ++j) {
            out << ",x" << j + 1;
        }
        out << '\n';
        for (Eigen::Index t = 0; t < s.X.rows(); ++t) {
            out << t + 1 << ',' << s.y(t);
            for (Eigen::Index j = 0; j < s.X.cols(); ++j) {
                out << ',' << s.X(t, j);
            }
            out << '\n';
        }
    }
    auto out = open_out(dir / (stem + "_truth.csv"));
    if (s.time_varying()) {
        out << "t";
        for (Eigen::Index j = 0; j < s.trueCoefPath.cols(); ++j) {
            out << ",beta" << j + 1;
        }
        out << '\n';
        for (Eigen::Index t = 0; t < s.trueCoefPath.rows(); ++t) {
            out << t + 1;
            for (Eigen::Index j = 0; j < s.trueCoefPath.cols(); ++j) {
                out << ',' << s.trueCoefPath(t, j);
            }
            out << '\n';
        }
    } else {
        out << "j,beta\n";
        for (Eigen::Index j = 0; j < s.trueCoef.size(); ++j) {
            out << j + 1 << ',' << s.trueCoef(j) << '\n';
        }
    }
}

json meta_json(const SimOutput& s) {
    json j;
    j["kind"] = to_string(s.kind);
    j["seed"] = s.meta.seed;
    j["replication"] = s.meta.replication;
    j["T"] = s.y.size();
    j["p"] = s.X.cols();
    j["warnings"] = s.meta.warnings;
    switch (s.kind) {
        case SimKind::PoissonJumps:
            j["mu"] = s.meta.mu;
            j["jumpTimes"] = s.meta.jumpTimes;
            break;
        case SimKind::RegressionEffects:
            j["exogenousCoefs"] = std::vector<double>(s.meta.exogenousCoefs.data(),
                                                      s.meta.exogenousCoefs.data() + s.meta.exogenousCoefs.size());
            break;
        case SimKind::RandomWalk:
            j["c0"] = s.meta.c0;
            break;
        case SimKind::SparseRegression:
            j["activeSet"] = s.meta.activeSet;
            break;
        case SimKind::Ar4:
            j["coefficients"] = kAr4Coefficients;
            break;
    }
    return j;
}

void write_matrix_csv(const Matrix& M, const std::string& prefix, const fs::path& path) {
    auto out = open_out(path);
    out << "t";
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
        out << ',' << prefix << j + 1;
    }
    out << '\n';
    for (Eigen::Index t = 0; t < M.rows(); ++t) {
        out << t + 1;
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            out << ',' << M(t, j);
        }
        out << '\n';
    }
}

std::vector<std::string> cmd_simulate(const RunConfig& cfg) {
    if (cfg.reps == 0) {
        throw ArgumentError("--reps must be at least 1");
    }
    std::vector<std::string> files;
    if (squash(cfg.simKind) == "macropanel") {
        for (std::size_t r = 0; r < cfg.reps; ++r) {
            const auto mp = simulate_macro_panel(cfg.macro, r);
            const std::string stem = "panel_rep" + std::to_string(r);
            write_panel_csv(mp.panel, cfg.out / (stem + ".csv"));
            write_matrix_csv(mp.factors, "f", cfg.out / (stem + "_factors.csv"));
            write_matrix_csv(mp.coefficients, "theta", cfg.out / (stem + "_coefficients.csv"));
            files.insert(files.end(), {stem + ".csv", stem + "_factors.csv", stem + "_coefficients.csv"});
        }
        return files;
    }
    cfg.sim.validate();
    json meta = json::array();
    std::vector<SimOutput> outs(cfg.reps);
    parallel_for(cfg.reps, cfg.threads, [&](std::size_t r) { outs[r] = simulate(cfg.sim, r); });
    for (std::size_t r = 0; r < cfg.reps; ++r) {
        const std::string stem = to_string(cfg.sim.kind) + "_rep" + std::to_string(r);
        write_sim(outs[r], cfg.out, stem);
        files.insert(files.end(), {stem + ".csv", stem + "_truth.csv"});
        for (const auto& w : outs[r].meta.warnings) {
            std::cerr << "warning: " << w << '\n';
        }
        meta.push_back(meta_json(outs[r]));
    }
    write_json(meta, cfg.out / "meta.json");
    files.emplace_back("meta.json");
    return files;
}

std::vector<std::string> cmd_fit(const RunConfig& cfg) {
    if (cfg.data.empty()) {
        throw ArgumentError("fit needs --data");
    }
    const auto table = read_numeric_csv(cfg.data);
    Eigen::Index yCol = -1;
    std::vector<Eigen::Index> xCols;
    std::vector<std::string> xNames;
    for (std::size_t j = 0; j < table.names.size(); ++j) {
        const auto& n = table.names[j];
        if (n == cfg.target) {
            yCol = static_cast<Eigen::Index>(j);
        } else if (n != "t" && n != "date") {
            xCols.push_back(static_cast<Eigen::Index>(j));
            xNames.push_back(n);
        }
    }
    if (yCol < 0) {
        throw DataError("target column '" + cfg.target + "' not found in " + cfg.data.string());
    }
    if (xCols.empty()) {
        throw DataError(cfg.data.string() + " has no predictor columns");
    }
    const Vector y = table.values.col(yCol);
    Matrix X(table.values.rows(), static_cast<Eigen::Index>(xCols.size()));
    for (std::size_t k = 0; k < xCols.size(); ++k) {
        X.col(static_cast<Eigen::Index>(k)) = table.values.col(xCols[k]);
    }

    const auto start = std::chrono::steady_clock::now();
    GampResult res;
    try {
        if (cfg.staticFit) {
            res = gamp_solve(DenseDesignOperator(X), y, cfg.gamp);
        } else {
            res = gamp_solve(build_tvp_operator(X), y, cfg.gamp);
        }
    } catch (const DivergenceError& e) {
        json diag;
        diag["error"] = e.what();
        diag["iteration"] = e.iteration();
        write_json(diag, cfg.out / "diagnostic.json");
        throw;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    {
        auto out = open_out(cfg.out / "beta_path.csv");
        out << "t";
        for (const auto& n : xNames) {
            out << ',' << n;
        }
        out << '\n';
        for (Eigen::Index t = 0; t < res.path.combined.rows(); ++t) {
            out << t + 1;
            for (Eigen::Index j = 0; j < res.path.combined.cols(); ++j) {
                out << ',' << res.path.combined(t, j);
            }
            out << '\n';
        }
    }
    write_volatility_csv(res.volatility, cfg.out / "volatility.csv");
    write_trace_csv(res.trace, cfg.out / "trace.csv");
    json summary;
    summary["iterations"] = res.state.iter;
    summary["converged"] = res.state.converged;
    summary["wall_seconds"] = seconds;
    summary["T"] = X.rows();
    summary["p"] = X.cols();
    summary["q"] = res.state.betaHat.size();
    summary["operator"] = cfg.staticFit ? "dense" : "tvp";
    summary["final_max_delta"] = res.trace.empty() ? json(nullptr) : jnum(res.trace.back().maxDelta);
    write_json(summary, cfg.out / "summary.json");
    return {"beta_path.csv", "volatility.csv", "trace.csv", "summary.json"};
}

std::vector<std::string> cmd_forecast(const RunConfig& cfg) {
    if (cfg.panel.empty()) {
        throw ArgumentError("forecast needs --panel");
    }
    const auto raw = read_panel_csv(cfg.panel, cfg.tcodes.empty() ? std::nullopt : std::optional(cfg.tcodes),
                                    cfg.defaultLevel);
    const auto data = prepare_forecast_data(raw, cfg.forecast.target);
    const auto records = run_recursive(data, cfg.forecast, cfg.gamp, cfg.threads);
    auto benchSpec = cfg.forecast;
    benchSpec.model = ForecastModel::Ar2Benchmark;
    const auto bench = cfg.forecast.model == ForecastModel::Ar2Benchmark
                           ? records
                           : run_recursive(data, benchSpec, cfg.gamp, cfg.threads);
    std::size_t flagged = 0;
    for (const auto& r : records) {
        flagged += r.flagged ? 1 : 0;
    }
    if (flagged > 0) {
        std::cerr << "warning: " << flagged << " of " << records.size()
                  << " origins flagged (fit failed) and excluded from the metrics\n";
    }
    write_forecasts_csv(records, cfg.out / "forecasts.csv");
    write_forecasts_csv(bench, cfg.out / "benchmark_forecasts.csv");
    const auto report = evaluate(records, bench, cfg.forecast.horizon);
    write_metrics_json(report, cfg.out / "metrics.json", cfg.forecast.horizon, to_string(cfg.forecast.model));
    write_cumsfe_csv(records, cfg.out / "cumsfe.csv");
    return {"forecasts.csv", "benchmark_forecasts.csv", "metrics.json", "cumsfe.csv"};
}

std::vector<std::string> cmd_evaluate(const RunConfig& cfg) {
    if (cfg.forecasts.empty()) {
        throw ArgumentError("evaluate needs --forecasts");
    }
    const auto records = read_forecasts_csv(cfg.forecasts);
    if (!cfg.benchmark.empty()) {
        const auto bench = read_forecasts_csv(cfg.benchmark);
        const auto report = evaluate(records, bench, cfg.forecast.horizon);
        write_metrics_json(report, cfg.out / "metrics.json", cfg.forecast.horizon, cfg.forecasts.stem().string());
    } else {
        json j;
        j["model"] = cfg.forecasts.stem().string();
        j["horizon"] = cfg.forecast.horizon;
        j["msfe"] = msfe(records);
        bool positive = true;
        for (const auto& r : records) {
            positive = positive && (r.flagged || r.predictiveVariance > 0.0);
        }
        j["log_apl"] = positive ? jnum(log_apl(records)) : json(nullptr);
        j["msfe_relative_to_ar2"] = nullptr;
        j["log_apl_spread_vs_ar2"] = nullptr;
        j["dm_statistic"] = nullptr;
        write_json(j, cfg.out / "metrics.json");
    }
    write_cumsfe_csv(records, cfg.out / "cumsfe.csv");
    return {"metrics.json", "cumsfe.csv"};
}

std::vector<std::string> cmd_benchmark(const RunConfig& cfg) {
    if (cfg.reps == 0) {
        throw ArgumentError("--reps must be at least 1");
    }
    BenchmarkSpec spec;
    spec.sim = cfg.sim;
    spec.reps = cfg.reps;
    spec.estimators = parse_estimators(cfg.estimators);
    spec.gamp = cfg.gamp;
    spec.gibbs = cfg.gibbs;
    const auto rows = run_benchmark(spec, cfg.threads);
    write_ad_csv(rows, cfg.out / "ad.csv");
    write_timing_csv(rows, spec, cfg.out / "timing.csv");
    return {"ad.csv", "timing.csv"};
}

void add_common(CLI::App* sub, RunConfig& cfg, std::string& configPath) {
    sub->add_option("--config", configPath, "JSON config file (flags take precedence)");
    sub->add_option("--out", cfg.out, "Output directory");
    sub->add_option("--seed", cfg.seed, "Master seed");
    sub->add_option("--threads", cfg.threads, "Worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
}

void add_sim(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--kind", cfg.simKind,
                    "poissonJumps|regressionEffects|randomWalk|sparseRegression|ar4 (simulate also: macroPanel)");
    sub->add_option("--T", cfg.sim.T, "Sample length");
    sub->add_option("--p", cfg.sim.p, "Predictors (sparse regression)");
    sub->add_option("--rho", cfg.sim.rho, "Predictor correlation");
    sub->add_option("--sparsity", cfg.sim.sparsity, "Fraction of active predictors");
    sub->add_option("--lambda", cfg.sim.lambda, "Poisson jump intensity");
    sub->add_flag("--orthogonalize", cfg.sim.orthogonalize, "Whiten the predictors");
    sub->add_option("--reps", cfg.reps, "Replications");
}

void add_gamp(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--variance", cfg.variance, "auto|known|em|sv");
    sub->add_option("--max-iter", cfg.gamp.maxIter, "Iteration cap");
    sub->add_option("--tol", cfg.gamp.tol, "Convergence tolerance on max |change in beta|");
    sub->add_option("--damping", cfg.gamp.damping, "Damping factor in (0, 1]");
    sub->add_option("--alpha-mode", cfg.alphaMode, "mean|mode");
    sub->add_option("--alpha-init", cfg.gamp.alphaInit, "Initial prior precision");
    sub->add_option("--sigma2", cfg.gamp.sigma2, "Known / initial noise variance");
    sub->add_option("--sv-estimator", cfg.svEstimator, "damped|weightedMean");
    sub->add_option("--no-shrink", cfg.gamp.noShrinkColumns, "Columns with a diffuse prior")->delimiter(',');
}

void add_forecast(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--target", cfg.forecast.target, "Price-level mnemonic");
    sub->add_option("--horizon", cfg.forecast.horizon, "Forecast horizon h");
    sub->add_option("--form", cfg.form, "gap|level");
    sub->add_option("--factors", cfg.forecast.nFactors, "Principal components K");
    sub->add_option("--own-lags", cfg.forecast.ownLags, "Own inflation lags");
    sub->add_option("--factor-lags", cfg.forecast.factorLags, "Factor lag offsets")->delimiter(',');
    sub->add_option("--holdout", cfg.forecast.holdoutFraction, "Holdout fraction");
    sub->add_option("--model", cfg.model, "tvpGamp|constGamp|ar2Benchmark");
}

std::string scan_config(int argc, const char* const* argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) {
            return argv[i + 1];
        }
        if (a.rfind("--config=", 0) == 0) {
            return a.substr(9);
        }
    }
    return {};
}

}  // namespace

void RunConfig::resolve() {
    const bool macroKind = squash(simKind) == "macropanel";
    if (!macroKind) {
        sim.kind = sim_kind_from_string(simKind);
    }
    sim.seed = seed;
    macro.seed = seed;
    if (macroKind) {
        macro.T = sim.T;
    }
    gibbs.seed = derive_seed(seed, 0x6962626973ULL);
    const bool forecasting = subcommand == "forecast" || subcommand == "fit";
    gamp.varianceMode = variance_from_string(variance, sim.kind, forecasting);
    const auto am = squash(alphaMode);
    if (am == "mean") {
        gamp.alphaUpdateMode = AlphaUpdateMode::Mean;
    } else if (am == "mode") {
        gamp.alphaUpdateMode = AlphaUpdateMode::GammaMode;
    } else {
        throw ArgumentError("unknown alpha mode '" + alphaMode + "' (mean|mode)");
    }
    const auto se = squash(svEstimator);
    if (se == "damped") {
        gamp.svEstimator = SvEstimator::Damped;
    } else if (se == "weightedmean") {
        gamp.svEstimator = SvEstimator::WeightedMean;
    } else {
        throw ArgumentError("unknown SV estimator '" + svEstimator + "' (damped|weightedMean)");
    }
    forecast.targetForm = target_form_from_string(form);
    forecast.model = forecast_model_from_string(model);
    if (threads == 0) {
        throw ArgumentError("--threads must be positive");
    }
    gamp.validate();
    if (subcommand == "forecast") {
        forecast.validate();
    }
}

json to_json(const RunConfig& c) {
    json j;
    j["subcommand"] = c.subcommand;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["sim"] = {{"kind", c.simKind},
                {"T", c.sim.T},
                {"p", c.sim.p},
                {"rho", c.sim.rho},
                {"sparsity", c.sim.sparsity},
                {"lambda", c.sim.lambda},
                {"orthogonalize", c.sim.orthogonalize},
                {"reps", c.reps},
                {"estimators", c.estimators}};
    j["macro"] = {{"nSeries", c.macro.nSeries},
                  {"nFactors", c.macro.nFactors},
                  {"factorPersistence", c.macro.factorPersistence},
                  {"coefDrift", c.macro.coefDrift},
                  {"inflationNoise", c.macro.inflationNoise},
                  {"priceName", c.macro.priceName}};
    std::vector<long long> noShrink(c.gamp.noShrinkColumns.begin(), c.gamp.noShrinkColumns.end());
    j["gamp"] = {{"a", c.gamp.a},
                 {"b", c.gamp.b},
                 {"maxIter", c.gamp.maxIter},
                 {"tol", c.gamp.tol},
                 {"damping", c.gamp.damping},
                 {"alphaMin", c.gamp.alphaMin},
                 {"alphaMax", c.gamp.alphaMax},
                 {"alphaMode", c.alphaMode},
                 {"updateAlpha", c.gamp.updateAlpha},
                 {"alphaInit", c.gamp.alphaInit},
                 {"tauBetaInit", c.gamp.tauBetaInit},
                 {"variance", c.variance},
                 {"resolvedVariance", c.gamp.varianceMode == VarianceMode::KnownConstant ? "known"
                                      : c.gamp.varianceMode == VarianceMode::EmConstant  ? "em"
                                                                                          : "sv"},
                 {"sigma2", c.gamp.sigma2},
                 {"c1", c.gamp.c1},
                 {"c2", c.gamp.c2},
                 {"svEstimator", c.svEstimator},
                 {"noShrink", noShrink},
                 {"divergenceThreshold", c.gamp.divergenceThreshold}};
    j["gibbs"] = {{"nSave", c.gibbs.nSave},
                  {"nBurn", c.gibbs.nBurn},
                  {"seed", c.gibbs.seed},
                  {"lasso", {{"r", c.gibbs.lasso.r}, {"delta", c.gibbs.lasso.delta}}},
                  {"ssvs", {{"pi0", c.gibbs.ssvs.pi0}, {"tau0", c.gibbs.ssvs.tau0}, {"tau1", c.gibbs.ssvs.tau1}}}};
    j["forecast"] = {{"target", c.forecast.target},
                     {"horizon", c.forecast.horizon},
                     {"form", c.form},
                     {"nFactors", c.forecast.nFactors},
                     {"ownLags", c.forecast.ownLags},
                     {"factorLags", c.forecast.factorLags},
                     {"holdoutFraction", c.forecast.holdoutFraction},
                     {"model", c.model},
                     {"coefficientRule", "last in-sample period beta_T"},
                     {"benchmarkVariance", "residual-variance plug-in"}};
    j["inputs"] = {{"data", c.data.string()},
                   {"target", c.target},
                   {"static", c.staticFit},
                   {"panel", c.panel.string()},
                   {"tcodes", c.tcodes.string()},
                   {"defaultLevel", c.defaultLevel},
                   {"forecasts", c.forecasts.string()},
                   {"benchmark", c.benchmark.string()}};
    return j;
}

void merge_json(RunConfig& c, const json& in) {
    const json& j = in.contains("config") && in.at("config").is_object() ? in.at("config") : in;
    if (!j.is_object()) {
        throw DataError("config must be a JSON object");
    }
    take(j, "seed", c.seed);
    take(j, "threads", c.threads);
    if (j.contains("sim")) {
        const auto& s = j.at("sim");
        take(s, "kind", c.simKind);
        take(s, "T", c.sim.T);
        take(s, "p", c.sim.p);
        take(s, "rho", c.sim.rho);
        take(s, "sparsity", c.sim.sparsity);
        take(s, "lambda", c.sim.lambda);
        take(s, "orthogonalize", c.sim.orthogonalize);
        take(s, "reps", c.reps);
        take(s, "estimators", c.estimators);
    }
    if (j.contains("macro")) {
        const auto& m = j.at("macro");
        take(m, "nSeries", c.macro.nSeries);
        take(m, "nFactors", c.macro.nFactors);
        take(m, "factorPersistence", c.macro.factorPersistence);
        take(m, "coefDrift", c.macro.coefDrift);
        take(m, "inflationNoise", c.macro.inflationNoise);
        take(m, "priceName", c.macro.priceName);
    }
    if (j.contains("gamp")) {
        const auto& g = j.at("gamp");
        take(g, "a", c.gamp.a);
        take(g, "b", c.gamp.b);
        take(g, "maxIter", c.gamp.maxIter);
        take(g, "tol", c.gamp.tol);
        take(g, "damping", c.gamp.damping);
        take(g, "alphaMin", c.gamp.alphaMin);
        take(g, "alphaMax", c.gamp.alphaMax);
        take(g, "alphaMode", c.alphaMode);
        take(g, "updateAlpha", c.gamp.updateAlpha);
        take(g, "alphaInit", c.gamp.alphaInit);
        take(g, "tauBetaInit", c.gamp.tauBetaInit);
        take(g, "variance", c.variance);
        take(g, "sigma2", c.gamp.sigma2);
        take(g, "c1", c.gamp.c1);
        take(g, "c2", c.gamp.c2);
        take(g, "svEstimator", c.svEstimator);
        take(g, "divergenceThreshold", c.gamp.divergenceThreshold);
        if (g.contains("noShrink")) {
            const auto cols = g.at("noShrink").get<std::vector<long long>>();
            c.gamp.noShrinkColumns.assign(cols.begin(), cols.end());
        }
    }
    if (j.contains("gibbs")) {
        const auto& g = j.at("gibbs");
        take(g, "nSave", c.gibbs.nSave);
        take(g, "nBurn", c.gibbs.nBurn);
        if (g.contains("lasso")) {
            take(g.at("lasso"), "r", c.gibbs.lasso.r);
            take(g.at("lasso"), "delta", c.gibbs.lasso.delta);
        }
        if (g.contains("ssvs")) {
            take(g.at("ssvs"), "pi0", c.gibbs.ssvs.pi0);
            take(g.at("ssvs"), "tau0", c.gibbs.ssvs.tau0);
            take(g.at("ssvs"), "tau1", c.gibbs.ssvs.tau1);
        }
    }
    if (j.contains("forecast")) {
        const auto& f = j.at("forecast");
        take(f, "target", c.forecast.target);
        take(f, "horizon", c.forecast.horizon);
        take(f, "form", c.form);
        take(f, "nFactors", c.forecast.nFactors);
        take(f, "ownLags", c.forecast.ownLags);
        take(f, "factorLags", c.forecast.factorLags);
        take(f, "holdoutFraction", c.forecast.holdoutFraction);
        take(f, "model", c.model);
    }
    if (j.contains("inputs")) {
        const auto& i = j.at("inputs");
        take_path(i, "data", c.data);
        take(i, "target", c.target);
        take(i, "static", c.staticFit);
        take_path(i, "panel", c.panel);
        take_path(i, "tcodes", c.tcodes);
        take(i, "defaultLevel", c.defaultLevel);
        take_path(i, "forecasts", c.forecasts);
        take_path(i, "benchmark", c.benchmark);
    }
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read " + path.string());
    }
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("SHA-256 initialisation failed");
    }
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    }
    return hex.str();
}

NumericTable read_numeric_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot read " + path.string());
    }
    NumericTable t;
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(path.string() + " is empty");
    }
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            t.names.push_back(cell);
        }
    }
    std::vector<std::vector<double>> rows;
    std::size_t lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::logic_error&) {
                used = 0;
            }
            if (used == 0 || used != cell.size() || !std::isfinite(v)) {
                throw DataError(path.string() + ":" + std::to_string(lineNo) + ": bad value '" + cell + "'");
            }
            row.push_back(v);
        }
        if (row.size() != t.names.size()) {
            throw DataError(path.string() + ":" + std::to_string(lineNo) + ": expected " +
                            std::to_string(t.names.size()) + " cells");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw DataError(path.string() + " has no data rows");
    }
    t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < t.names.size(); ++c) {
            t.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return t;
}

int run_cli(int argc, const char* const* argv) {
    RunConfig cfg;
    cfg.threads = default_threads();
    std::string configPath;
    try {
        configPath = scan_config(argc, argv);
        if (!configPath.empty()) {
            std::ifstream in(configPath);
            if (!in) {
                throw DataError("cannot read config " + configPath);
            }
            merge_json(cfg, json::parse(in));
        }
    } catch (const json::exception& e) {
        std::cerr << "error: config " << configPath << ": " << e.what() << '\n';
        return kExitData;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }

    CLI::App app{"Sparse Bayesian time-varying-parameter regression by message passing"};
    app.require_subcommand(1);
    auto* sim = app.add_subcommand("simulate", "Write simulated data sets");
    auto* fit = app.add_subcommand("fit", "Fit one regression from a CSV");
    auto* fc = app.add_subcommand("forecast", "Recursive out-of-sample forecasts");
    auto* ev = app.add_subcommand("evaluate", "Score forecasts.csv files");
    auto* bm = app.add_subcommand("benchmark", "Monte Carlo AD comparison across estimators");
    for (auto* s : {sim, fit, fc, ev, bm}) {
        add_common(s, cfg, configPath);
    }
    add_sim(sim, cfg);
    sim->add_option("--series", cfg.macro.nSeries, "macroPanel: predictor series");
    sim->add_option("--factors", cfg.macro.nFactors, "macroPanel: latent factors");
    sim->add_option("--coef-drift", cfg.macro.coefDrift, "macroPanel: coefficient random-walk sd");

    add_gamp(fit, cfg);
    fit->add_option("--data", cfg.data, "CSV with a header row")->check(CLI::ExistingFile);
    fit->add_option("--target", cfg.target, "Response column");
    fit->add_flag("--static", cfg.staticFit, "Constant coefficients (dense operator)");

    add_gamp(fc, cfg);
    add_forecast(fc, cfg);
    fc->add_option("--panel", cfg.panel, "Panel CSV")->check(CLI::ExistingFile);
    fc->add_option("--tcodes", cfg.tcodes, "Transformation-code sidecar JSON")->check(CLI::ExistingFile);
    fc->add_flag("--default-level", cfg.defaultLevel, "Series without a code are taken in levels");

    ev->add_option("--forecasts", cfg.forecasts, "Model forecasts.csv")->check(CLI::ExistingFile);
    ev->add_option("--benchmark", cfg.benchmark, "Benchmark forecasts.csv")->check(CLI::ExistingFile);
    ev->add_option("--horizon", cfg.forecast.horizon, "Horizon used for the HAC lag");

    add_sim(bm, cfg);
    add_gamp(bm, cfg);
    bm->add_option("--estimators", cfg.estimators, "Comma list: gamp,ols,olsPerPredictor,lasso,ssvs");
    bm->add_option("--n-save", cfg.gibbs.nSave, "Gibbs draws kept");
    bm->add_option("--n-burn", cfg.gibbs.nBurn, "Gibbs burn-in draws");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }
    for (auto* s : {sim, fit, fc, ev, bm}) {
        if (s->parsed()) {
            cfg.subcommand = s->get_name();
        }
    }

    try {
        cfg.resolve();
        fs::create_directories(cfg.out);
        std::vector<std::string> files;
        if (cfg.subcommand == "simulate") {
            files = cmd_simulate(cfg);
        } else if (cfg.subcommand == "fit") {
            files = cmd_fit(cfg);
        } else if (cfg.subcommand == "forecast") {
            files = cmd_forecast(cfg);
        } else if (cfg.subcommand == "evaluate") {
            files = cmd_evaluate(cfg);
        } else {
            files = cmd_benchmark(cfg);
        }
        json manifest;
        manifest["tool"] = "tvpgamp";
        manifest["subcommand"] = cfg.subcommand;
        manifest["seed"] = cfg.seed;
        manifest["config"] = to_json(cfg);
        json artifacts = json::object();
        for (const auto& f : files) {
            artifacts[f] = sha256_file(cfg.out / f);
        }
        manifest["artifacts"] = artifacts;
        write_json(manifest, cfg.out / "manifest.json");
        return kExitOk;
    } catch (const ArgumentError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    }
}

}  // namespace tvpgamp
