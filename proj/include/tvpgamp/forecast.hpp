#pragma once

#include "tvpgamp/gamp.hpp"
#include "tvpgamp/ingest.hpp"
#include "tvpgamp/linalg.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tvpgamp {

enum class ForecastModel { TvpGamp, ConstGamp, Ar2Benchmark };

std::string to_string(ForecastModel model);
ForecastModel forecast_model_from_string(const std::string& name);
std::string to_string(TargetForm form);
TargetForm target_form_from_string(const std::string& name);

struct ForecastSpec {
    int horizon = 1;
    TargetForm targetForm = TargetForm::Gap;
    int nFactors = 20;
    int ownLags = 2;
    std::vector<int> factorLags{0, 1};
    double holdoutFraction = 0.5;
    ForecastModel model = ForecastModel::TvpGamp;
    std::string target = "CPIAUCSL";  // mnemonic of the price level

    void validate() const;
};

/// Price level of the target plus the transformed predictor block.
struct ForecastData {
    std::vector<std::string> dates;
    std::vector<double> price;
    Matrix predictors;  // n x N, NaN before each series' first observation
    std::vector<std::string> predictorNames;
    std::map<std::string, std::size_t> leadingMissing;
};

/// Splits `raw` into the target price level and every other series,
/// transformed by its code. Throws DataError if the target is absent.
ForecastData prepare_forecast_data(const RawPanel& raw, const std::string& target);

/// Keeps the first `rows` observations.
ForecastData truncate(const ForecastData& data, std::size_t rows);

struct ForecastRecord {
    std::string originDate;
    std::string targetDate;
    std::size_t origin = 0;  // panel row index of the origin
    double pointForecast = 0.0;
    double predictiveVariance = 0.0;
    double realized = kMissing;
    bool flagged = false;  // fit failed; excluded from metrics
    std::string note;
};

/// Origins n - H, ..., n - 1 - h with H = round(holdoutFraction * n).
std::vector<std::size_t> holdout_origins(std::size_t n, const ForecastSpec& spec);

/**
 * Fits the model on information dated at or before `origin` and forecasts
 * pi^h_{origin+h}. PCA is re-estimated on the predictor rows up to the
 * origin. The realized value is filled in when the panel extends far
 * enough. A GAMP divergence yields a flagged record.
 */
ForecastRecord forecast_at_origin(const ForecastData& data, const ForecastSpec& spec,
                                  const GampConfig& cfg, std::size_t origin);

/// Forecasts every holdout origin; origins are independent and run on up to
/// `threads` workers with results kept in origin order.
std::vector<ForecastRecord> run_recursive(const ForecastData& data, const ForecastSpec& spec,
                                          const GampConfig& cfg, std::size_t threads = 1);

double msfe(const std::vector<ForecastRecord>& records);
/// Model MSFE over benchmark MSFE on the origins both evaluated.
double relative_msfe(const std::vector<ForecastRecord>& model,
                     const std::vector<ForecastRecord>& benchmark);
/// Mean over origins of log N(realized | point, variance).
double log_apl(const std::vector<ForecastRecord>& records);
/// log_apl(model) - log_apl(benchmark) on the common origins.
double log_apl_spread(const std::vector<ForecastRecord>& model,
                      const std::vector<ForecastRecord>& benchmark);
/// Mean of lossA - lossB over its Bartlett HAC standard error with h - 1 lags.
/// Negative values favour A.
double dm_statistic(const std::vector<double>& lossA, const std::vector<double>& lossB, int horizon);
/// Running sums of squared errors in origin order.
std::vector<double> cumulative_sfe(const std::vector<ForecastRecord>& records);

struct EvalReport {
    double msfe = 0.0;
    double msfeRelativeToAr2 = 0.0;
    double logApl = 0.0;
    double logAplSpreadVsAr2 = 0.0;
    double dmStatistic = 0.0;
    std::vector<double> cumulativeSfe;
    std::size_t nEvaluated = 0;
    std::size_t nFlagged = 0;
};

EvalReport evaluate(const std::vector<ForecastRecord>& model,
                    const std::vector<ForecastRecord>& benchmark, int horizon);

void write_forecasts_csv(const std::vector<ForecastRecord>& records,
                         const std::filesystem::path& path);
std::vector<ForecastRecord> read_forecasts_csv(const std::filesystem::path& path);
void write_cumsfe_csv(const std::vector<ForecastRecord>& records,
                      const std::filesystem::path& path);
void write_metrics_json(const EvalReport& report, const std::filesystem::path& path,
                        int horizon, const std::string& model);

}  // namespace tvpgamp
