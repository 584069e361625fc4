#include "tvpgamp/forecast.hpp"

#include "tvpgamp/design.hpp"
#include "tvpgamp/error.hpp"
#include "tvpgamp/oracles.hpp"
#include "tvpgamp/parallel.hpp"
#include "tvpgamp/pca.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

namespace tvpgamp {

namespace {

std::string lower(std::string s) {
    for (char& c : s) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

// Shifts a YYYY-MM[...] stamp by `months`, keeping whatever follows the month.
std::string add_months(const std::string& date, int months) {
    if (date.size() < 7 || date[4] != '-') {
        return date + "+" + std::to_string(months);
    }
    const int year = std::stoi(date.substr(0, 4));
    const int month = std::stoi(date.substr(5, 2));
    const int total = year * 12 + (month - 1) + months;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", total / 12, total % 12 + 1);
    return std::string(buf) + date.substr(7);
}

bool usable(const ForecastRecord& r) { return !r.flagged && !is_missing(r.realized); }

double log_density(const ForecastRecord& r) {
    const double e = r.realized - r.pointForecast;
    return -0.5 * std::log(2.0 * std::numbers::pi * r.predictiveVariance) -
           0.5 * e * e / r.predictiveVariance;
}

// Pairs of records sharing an origin, both usable, in origin order.
std::vector<std::pair<const ForecastRecord*, const ForecastRecord*>> common_origins(
    const std::vector<ForecastRecord>& a, const std::vector<ForecastRecord>& b) {
    std::map<std::size_t, const ForecastRecord*> byOrigin;
    for (const auto& r : b) {
        if (usable(r)) {
            byOrigin[r.origin] = &r;
        }
    }
    std::vector<std::pair<const ForecastRecord*, const ForecastRecord*>> out;
    for (const auto& r : a) {
        if (!usable(r)) {
            continue;
        }
        const auto it = byOrigin.find(r.origin);
        if (it != byOrigin.end()) {
            out.emplace_back(&r, it->second);
        }
    }
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

double parse_double(const std::string& s) {
    if (s.empty() || lower(s) == "nan" || s == "NA") {
        return kMissing;
    }
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) {
        throw DataError("malformed number '" + s + "'");
    }
    return v;
}

}  // namespace

std::string to_string(ForecastModel model) {
    switch (model) {
        case ForecastModel::TvpGamp:
            return "tvpGamp";
        case ForecastModel::ConstGamp:
            return "constGamp";
        case ForecastModel::Ar2Benchmark:
            return "ar2Benchmark";
    }
    return "unknown";
}

ForecastModel forecast_model_from_string(const std::string& name) {
    const auto key = lower(name);
    if (key == "tvpgamp" || key == "tvp") {
        return ForecastModel::TvpGamp;
    }
    if (key == "constgamp" || key == "const") {
        return ForecastModel::ConstGamp;
    }
    if (key == "ar2benchmark" || key == "ar2") {
        return ForecastModel::Ar2Benchmark;
    }
    throw ArgumentError("unknown forecast model '" + name + "'");
}

std::string to_string(TargetForm form) { return form == TargetForm::Gap ? "gap" : "level"; }

TargetForm target_form_from_string(const std::string& name) {
    const auto key = lower(name);
    if (key == "gap") {
        return TargetForm::Gap;
    }
    if (key == "level") {
        return TargetForm::Level;
    }
    throw ArgumentError("unknown target form '" + name + "' (gap|level)");
}

void ForecastSpec::validate() const {
    if (horizon <= 0) {
        throw ArgumentError("forecast horizon must be positive");
    }
    if (!(holdoutFraction > 0.0 && holdoutFraction < 1.0)) {
        throw ArgumentError("holdoutFraction must lie in (0, 1)");
    }
    if (nFactors < 0 || ownLags < 0) {
        throw ArgumentError("nFactors and ownLags must be non-negative");
    }
    if (model == ForecastModel::Ar2Benchmark && ownLags == 0) {
        throw ArgumentError("the AR benchmark needs at least one own lag");
    }
}

ForecastData prepare_forecast_data(const RawPanel& raw, const std::string& target) {
    raw.validate();
    const auto it = raw.series.find(target);
    if (it == raw.series.end()) {
        throw DataError("target series '" + target + "' not found in the panel");
    }
    ForecastData data;
    data.dates = raw.dates;
    data.price = it->second;
    for (std::size_t t = 0; t < data.price.size(); ++t) {
        if (is_missing(data.price[t]) || !(data.price[t] > 0.0)) {
            throw DomainError("target series '" + target + "' must be positive and complete (index " +
                              std::to_string(t) + ")");
        }
    }
    for (const auto& name : raw.mnemonics) {
        if (name != target) {
            data.predictorNames.push_back(name);
        }
    }
    if (!data.predictorNames.empty()) {
        const auto panel = to_stationary(raw, data.predictorNames);
        data.predictors = panel.matrix(data.predictorNames);
        data.leadingMissing = panel.leadingMissing;
    } else {
        data.predictors.resize(static_cast<Eigen::Index>(raw.length()), 0);
    }
    return data;
}

ForecastData truncate(const ForecastData& data, std::size_t rows) {
    if (rows > data.price.size()) {
        throw ArgumentError("cannot truncate to more rows than the data holds");
    }
    ForecastData out;
    out.dates.assign(data.dates.begin(), data.dates.begin() + static_cast<std::ptrdiff_t>(rows));
    out.price.assign(data.price.begin(), data.price.begin() + static_cast<std::ptrdiff_t>(rows));
    out.predictors = data.predictors.topRows(static_cast<Eigen::Index>(rows));
    out.predictorNames = data.predictorNames;
    out.leadingMissing = data.leadingMissing;
    return out;
}

std::vector<std::size_t> holdout_origins(std::size_t n, const ForecastSpec& spec) {
    spec.validate();
    const auto H = static_cast<std::size_t>(std::llround(spec.holdoutFraction * static_cast<double>(n)));
    const auto h = static_cast<std::size_t>(spec.horizon);
    std::vector<std::size_t> origins;
    if (H <= h || H > n) {
        return origins;
    }
    for (std::size_t t = n - H; t + h <= n - 1; ++t) {
        origins.push_back(t);
    }
    return origins;
}

ForecastRecord forecast_at_origin(const ForecastData& data, const ForecastSpec& spec,
                                  const GampConfig& cfg, std::size_t origin) {
    spec.validate();
    const std::size_t n = data.price.size();
    if (origin >= n) {
        throw ArgumentError("origin " + std::to_string(origin) + " outside the sample");
    }
    const std::size_t rows = origin + 1;
    const auto h = static_cast<std::size_t>(spec.horizon);

    ForecastRecord rec;
    rec.origin = origin;
    rec.originDate = origin < data.dates.size() ? data.dates[origin] : std::to_string(origin);
    rec.targetDate = origin + h < data.dates.size() ? data.dates[origin + h]
                                                    : add_months(rec.originDate, spec.horizon);
    if (origin + h < n) {
        rec.realized = (1200.0 / spec.horizon) * std::log(data.price[origin + h] / data.price[origin]);
    }

    // factors from information up to the origin only
    Matrix factors(static_cast<Eigen::Index>(rows), 0);
    const Eigen::Index nSeries = data.predictors.cols();
    if (spec.nFactors > 0 && nSeries > 0) {
        const Matrix block = data.predictors.topRows(static_cast<Eigen::Index>(rows));
        Eigen::Index start = 0;
        while (start < block.rows() && block.row(start).hasNaN()) {
            ++start;
        }
        const Eigen::Index usableRows = block.rows() - start;
        if (usableRows < 2) {
            throw DataError("too few complete predictor rows before origin " + rec.originDate);
        }
        if (block.bottomRows(usableRows).hasNaN()) {
            throw DataError("predictor panel has interior gaps before origin " + rec.originDate);
        }
        const Eigen::Index K = std::min<Eigen::Index>(spec.nFactors, std::min(usableRows, nSeries));
        const auto model = fit_pca(block.bottomRows(usableRows), K, data.predictorNames);
        factors = Matrix::Constant(block.rows(), K, kMissing);
        factors.bottomRows(usableRows) = transform_pca(model, block.bottomRows(usableRows));
    }

    FrameSpec fs;
    fs.horizon = spec.horizon;
    fs.form = spec.targetForm;
    fs.ownLags = spec.ownLags;
    fs.predictorLags = spec.nFactors > 0 ? spec.factorLags : std::vector<int>{};
    fs.intercept = true;
    const auto frame = make_regression_frame(
        std::span<const double>(data.price.data(), rows), factors, fs);
    if (frame.rowIndex.back() != origin) {
        throw DataError("origin row missing from the regression frame");
    }
    const Eigen::Index last = static_cast<Eigen::Index>(frame.rowIndex.size()) - 1;
    const auto nTrain = static_cast<Eigen::Index>(frame.nTrain);
    const Eigen::Index p = frame.X.cols();
    const Vector x = frame.X.row(last).transpose();
    const Matrix Xtrain = frame.X.topRows(nTrain);
    const Vector ytrain = frame.y.head(nTrain);

    GampConfig gc = cfg;
    gc.tracePath.reset();
    gc.noShrinkColumns.clear();
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(frame.nUnshrunk); ++j) {
        gc.noShrinkColumns.push_back(j);
    }

    try {
        switch (spec.model) {
            case ForecastModel::TvpGamp: {
                if (nTrain < 2) {
                    throw DataError("too few training rows at origin " + rec.originDate);
                }
                const auto op = build_tvp_operator(Xtrain);
                const auto res = gamp_solve(op, ytrain, gc);
                const Vector betaT = res.path.combined.row(nTrain - 1).transpose();
                const Vector tau = res.state.tauBeta.head(p) + res.state.tauBeta.segment(nTrain * p, p);
                rec.pointForecast = x.dot(betaT);
                rec.predictiveVariance = x.array().square().matrix().dot(tau) + res.state.sigma2(nTrain - 1);
                if (!res.state.converged) {
                    rec.note = "maxIter reached";
                }
                break;
            }
            case ForecastModel::ConstGamp: {
                if (nTrain < 2) {
                    throw DataError("too few training rows at origin " + rec.originDate);
                }
                const DenseDesignOperator op(Xtrain);
                const auto res = gamp_solve(op, ytrain, gc);
                rec.pointForecast = x.dot(res.state.betaHat);
                rec.predictiveVariance = x.array().square().matrix().dot(res.state.tauBeta) +
                                         res.state.sigma2(nTrain - 1);
                if (!res.state.converged) {
                    rec.note = "maxIter reached";
                }
                break;
            }
            case ForecastModel::Ar2Benchmark: {
                const auto k = static_cast<Eigen::Index>(frame.nUnshrunk);
                if (nTrain <= k) {
                    throw DataError("too few training rows for the AR benchmark at origin " +
                                    rec.originDate);
                }
                const Matrix Z = Xtrain.leftCols(k);
                const Vector b = ols(Z, ytrain);
                const double ssr = (ytrain - Z * b).squaredNorm();
                rec.pointForecast = x.head(k).dot(b);
                rec.predictiveVariance = ssr / static_cast<double>(nTrain - k);
                break;
            }
        }
    } catch (const NumericalError& e) {
        rec.flagged = true;
        rec.note = e.what();
        rec.pointForecast = kMissing;
        rec.predictiveVariance = kMissing;
        return rec;
    }
    if (spec.targetForm == TargetForm::Gap) {
        rec.pointForecast += frame.pi(last);
    }
    if (!std::isfinite(rec.pointForecast) || !(rec.predictiveVariance > 0.0)) {
        rec.flagged = true;
        rec.note = "non-finite forecast or non-positive predictive variance";
    }
    return rec;
}

std::vector<ForecastRecord> run_recursive(const ForecastData& data, const ForecastSpec& spec,
                                          const GampConfig& cfg, std::size_t threads) {
    const auto origins = holdout_origins(data.price.size(), spec);
    if (origins.empty()) {
        throw DataError("holdout contains no origin with an observable h-step target");
    }
    std::vector<ForecastRecord> records(origins.size());
    parallel_for(origins.size(), threads,
                 [&](std::size_t i) { records[i] = forecast_at_origin(data, spec, cfg, origins[i]); });
    return records;
}

double msfe(const std::vector<ForecastRecord>& records) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : records) {
        if (usable(r)) {
            const double e = r.realized - r.pointForecast;
            sum += e * e;
            ++n;
        }
    }
    if (n == 0) {
        throw DataError("no evaluable forecasts");
    }
    return sum / static_cast<double>(n);
}

double relative_msfe(const std::vector<ForecastRecord>& model,
                     const std::vector<ForecastRecord>& benchmark) {
    const auto pairs = common_origins(model, benchmark);
    if (pairs.empty()) {
        throw DataError("model and benchmark share no evaluable origin");
    }
    double a = 0.0;
    double b = 0.0;
    for (const auto& [m, bm] : pairs) {
        a += std::pow(m->realized - m->pointForecast, 2);
        b += std::pow(bm->realized - bm->pointForecast, 2);
    }
    return a / b;
}

double log_apl(const std::vector<ForecastRecord>& records) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : records) {
        if (usable(r)) {
            sum += log_density(r);
            ++n;
        }
    }
    if (n == 0) {
        throw DataError("no evaluable forecasts");
    }
    return sum / static_cast<double>(n);
}

double log_apl_spread(const std::vector<ForecastRecord>& model,
                      const std::vector<ForecastRecord>& benchmark) {
    const auto pairs = common_origins(model, benchmark);
    if (pairs.empty()) {
        throw DataError("model and benchmark share no evaluable origin");
    }
    double sum = 0.0;
    for (const auto& [m, bm] : pairs) {
        sum += log_density(*m) - log_density(*bm);
    }
    return sum / static_cast<double>(pairs.size());
}

double dm_statistic(const std::vector<double>& lossA, const std::vector<double>& lossB, int horizon) {
    if (lossA.size() != lossB.size()) {
        throw ArgumentError("loss series differ in length");
    }
    if (horizon <= 0) {
        throw ArgumentError("horizon must be positive");
    }
    const std::size_t n = lossA.size();
    if (n < 2) {
        throw ArgumentError("Diebold-Mariano statistic needs at least two losses");
    }
    std::vector<double> d(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = lossA[i] - lossB[i];
        mean += d[i];
    }
    mean /= static_cast<double>(n);
    auto autocov = [&](std::size_t k) {
        double s = 0.0;
        for (std::size_t i = k; i < n; ++i) {
            s += (d[i] - mean) * (d[i - k] - mean);
        }
        return s / static_cast<double>(n);
    };
    const auto L = static_cast<std::size_t>(horizon - 1);
    double lrv = autocov(0);
    for (std::size_t k = 1; k <= L && k < n; ++k) {
        lrv += 2.0 * (1.0 - static_cast<double>(k) / static_cast<double>(L + 1)) * autocov(k);
    }
    if (mean == 0.0) {
        return 0.0;
    }
    if (!(lrv > 0.0)) {
        return std::copysign(std::numeric_limits<double>::infinity(), mean);
    }
    return mean / std::sqrt(lrv / static_cast<double>(n));
}

std::vector<double> cumulative_sfe(const std::vector<ForecastRecord>& records) {
    std::vector<double> out;
    double sum = 0.0;
    for (const auto& r : records) {
        if (usable(r)) {
            const double e = r.realized - r.pointForecast;
            sum += e * e;
            out.push_back(sum);
        }
    }
    return out;
}

EvalReport evaluate(const std::vector<ForecastRecord>& model,
                    const std::vector<ForecastRecord>& benchmark, int horizon) {
    EvalReport rep;
    for (const auto& r : model) {
        if (r.flagged) {
            ++rep.nFlagged;
        } else if (!is_missing(r.realized)) {
            ++rep.nEvaluated;
        }
    }
    rep.msfe = msfe(model);
    rep.logApl = log_apl(model);
    rep.cumulativeSfe = cumulative_sfe(model);
    rep.msfeRelativeToAr2 = relative_msfe(model, benchmark);
    rep.logAplSpreadVsAr2 = log_apl_spread(model, benchmark);
    std::vector<double> la;
    std::vector<double> lb;
    for (const auto& [m, b] : common_origins(model, benchmark)) {
        la.push_back(std::pow(m->realized - m->pointForecast, 2));
        lb.push_back(std::pow(b->realized - b->pointForecast, 2));
    }
    rep.dmStatistic = la.size() >= 2 ? dm_statistic(la, lb, horizon) : 0.0;
    return rep;
}

void write_forecasts_csv(const std::vector<ForecastRecord>& records,
                         const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << std::setprecision(17)
        << "origin_date,target_date,origin,point,variance,realized,flagged,note\n";
    for (const auto& r : records) {
        out << r.originDate << ',' << r.targetDate << ',' << r.origin << ',' << r.pointForecast
            << ',' << r.predictiveVariance << ',' << r.realized << ',' << (r.flagged ? 1 : 0) << ','
            << r.note << '\n';
    }
}

std::vector<ForecastRecord> read_forecasts_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot read " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(path.string() + " is empty");
    }
    const auto header = split_csv_line(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        col[header[i]] = i;
    }
    for (const char* need : {"origin_date", "point", "variance", "realized"}) {
        if (!col.count(need)) {
            throw DataError(path.string() + " lacks column '" + need + "'");
        }
    }
    std::vector<ForecastRecord> out;
    std::size_t lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty()) {
            continue;
        }
        const auto cells = split_csv_line(line);
        auto cell = [&](const std::string& name) -> std::string {
            const auto it = col.find(name);
            return it != col.end() && it->second < cells.size() ? cells[it->second] : "";
        };
        ForecastRecord r;
        try {
            r.originDate = cell("origin_date");
            r.targetDate = cell("target_date");
            r.origin = col.count("origin") ? std::stoul(cell("origin")) : out.size();
            r.pointForecast = parse_double(cell("point"));
            r.predictiveVariance = parse_double(cell("variance"));
            r.realized = parse_double(cell("realized"));
            r.flagged = cell("flagged") == "1";
            r.note = cell("note");
        } catch (const std::logic_error& e) {
            throw DataError(path.string() + ":" + std::to_string(lineNo) + ": " + e.what());
        }
        out.push_back(std::move(r));
    }
    return out;
}

void write_cumsfe_csv(const std::vector<ForecastRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << std::setprecision(17) << "origin_date,cumulative_sfe\n";
    double sum = 0.0;
    for (const auto& r : records) {
        if (usable(r)) {
            sum += std::pow(r.realized - r.pointForecast, 2);
            out << r.originDate << ',' << sum << '\n';
        }
    }
}

void write_metrics_json(const EvalReport& report, const std::filesystem::path& path, int horizon,
                        const std::string& model) {
    nlohmann::json j;
    j["model"] = model;
    j["horizon"] = horizon;
    j["msfe"] = report.msfe;
    j["msfe_relative_to_ar2"] = report.msfeRelativeToAr2;
    j["log_apl"] = report.logApl;
    j["log_apl_spread_vs_ar2"] = report.logAplSpreadVsAr2;
    j["dm_statistic"] = report.dmStatistic;
    j["n_evaluated"] = report.nEvaluated;
    j["n_flagged"] = report.nFlagged;
    j["forecast_coefficient_rule"] = "last in-sample period beta_T";
    j["benchmark_variance"] = "residual-variance plug-in";
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << std::setprecision(17) << j.dump(2) << '\n';
}

}  // namespace tvpgamp
