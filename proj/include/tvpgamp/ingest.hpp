#pragma once

#include "tvpgamp/error.hpp"
#include "tvpgamp/linalg.hpp"

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tvpgamp {

/// Level or log argument outside its domain (e.g. log of a non-positive price).
class DomainError : public DataError {
public:
    using DataError::DataError;
};

/// Missing observations are carried as quiet NaN throughout the pipeline.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) noexcept { return std::isnan(v); }

/**
 * Stationarity transformation codes in the FRED-MD convention.
 *
 *  1: x = w                     4: x = log w
 *  2: x = w - w(-1)             5: x = log w - log w(-1)
 *  3: x = D w - D w(-1)         6: x = D log w - D log w(-1)
 */
enum class TransformCode : int {
    Level = 1,
    Diff = 2,
    Diff2 = 3,
    Log = 4,
    LogDiff = 5,
    LogDiff2 = 6,
};

/// Validates an integer code. Throws DataError outside 1..6.
TransformCode transform_code_from_int(int code);
/// 0 for codes 1 and 4, 1 for 2 and 5, 2 for 3 and 6.
int differencing_order(TransformCode code) noexcept;
bool uses_log(TransformCode code) noexcept;

struct RawPanel {
    std::vector<std::string> dates;
    std::vector<std::string> mnemonics;  // column order as read
    std::map<std::string, std::vector<double>> series;
    std::map<std::string, TransformCode> tcodes;

    [[nodiscard]] std::size_t length() const noexcept { return dates.size(); }
    /// Throws DataError if lengths, codes or date ordering are inconsistent.
    void validate() const;
};

struct StationaryPanel {
    std::vector<std::string> dates;
    std::vector<std::string> mnemonics;
    std::map<std::string, std::vector<double>> series;
    std::map<std::string, std::size_t> leadingMissing;

    [[nodiscard]] std::size_t length() const noexcept { return dates.size(); }
    /// First index at which every series is observed.
    [[nodiscard]] std::size_t common_start() const;
    /// n x N matrix of the named series (all series when `names` is empty),
    /// missing head entries left as NaN.
    [[nodiscard]] Matrix matrix(const std::vector<std::string>& names = {}) const;
};

/// Applies one transformation code. The first d entries (d = differencing
/// order) are missing, as are entries that depend on a missing level.
/// Throws DomainError naming `series` and the index for non-positive levels
/// under a log code.
std::vector<double> apply_transform(std::span<const double> levels, TransformCode code,
                                    std::string_view series = "");

/// h-period annualised inflation 1200/h * log(P_t / P_{t-h}); first h entries missing.
std::vector<double> build_inflation_target(std::span<const double> price, int horizon);

/// Transforms every series of the panel by its code.
StationaryPanel to_stationary(const RawPanel& raw);
/// Same, restricted to `keep` (in that order).
StationaryPanel to_stationary(const RawPanel& raw, const std::vector<std::string>& keep);

/// Parses the panel CSV: a `date` column followed by one column per mnemonic,
/// with an optional second row whose date cell reads `transform`. Empty, `NA`
/// and `NaN` cells count as missing; only leading gaps are allowed.
/// Codes not present in the file are taken from `tcodes`; series still
/// lacking a code default to 1 only when `defaultLevel` is set.
RawPanel parse_panel_csv(std::istream& in, const std::map<std::string, int>& tcodes = {},
                         bool defaultLevel = false);
RawPanel read_panel_csv(const std::filesystem::path& csv,
                        const std::optional<std::filesystem::path>& sidecar = std::nullopt,
                        bool defaultLevel = false);
/// Reads `{ "tcodes": { "<mnemonic>": <int> } }`.
std::map<std::string, int> read_tcodes_json(const std::filesystem::path& path);
/// Writes a panel in the same layout, including the transform row.
void write_panel_csv(const RawPanel& panel, const std::filesystem::path& path);

enum class TargetForm {
    Gap,    // pi^h_{t+h} - pi_t on [1, D pi_t, ..., factors]
    Level,  // pi^h_{t+h} on [1, pi_t, ..., factors]
};

struct FrameSpec {
    int horizon = 1;
    TargetForm form = TargetForm::Gap;
    int ownLags = 2;
    std::vector<int> predictorLags{0, 1};
    bool intercept = true;
};

/// Direct-forecast regression frame. Row r carries regressors dated
/// rowIndex[r] and the target dated rowIndex[r] + horizon.
struct RegressionFrame {
    std::vector<std::size_t> rowIndex;
    Matrix X;
    Vector y;             // NaN where the target date lies past the sample end
    Vector pi;            // pi_t (one-period inflation) at each row's regressor date
    std::size_t nTrain = 0;  // leading rows whose target is observed
    std::size_t nUnshrunk = 0;  // intercept + own-lag columns (leading)
    int horizon = 1;
    TargetForm form = TargetForm::Gap;
    std::vector<std::string> columnNames;
};

/**
 * Aligns the inflation target built from `priceLevel` with its own lags and
 * lagged predictors.
 *
 * Rows with any missing regressor are dropped from the head; a missing value
 * after the first complete row is a DataError, as is a frame without a
 * single observed target.
 */
RegressionFrame make_regression_frame(std::span<const double> priceLevel, const Matrix& predictors,
                                      const FrameSpec& spec);

}  // namespace tvpgamp
