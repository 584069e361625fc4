#include "tvpgamp/ingest.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <sstream>

namespace tvpgamp {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\"");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n\"");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            cells.push_back(trim(cell));
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    cells.push_back(trim(cell));
    return cells;
}

bool is_missing_token(const std::string& s) {
    return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "." || s == "#N/A";
}

double parse_real(const std::string& token, std::size_t line, const std::string& column) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0' || errno == ERANGE) {
        throw DataError("line " + std::to_string(line) + ", column '" + column +
                        "': cannot parse '" + token + "' as a real number");
    }
    return v;
}

bool plausible_date(const std::string& s) {
    // YYYY-MM or YYYY-MM-DD, optionally followed by a time part
    if (s.size() < 7 || s[4] != '-') {
        return false;
    }
    for (std::size_t i : {0U, 1U, 2U, 3U, 5U, 6U}) {
        if (std::isdigit(static_cast<unsigned char>(s[i])) == 0) {
            return false;
        }
    }
    return true;
}

}  // namespace

TransformCode transform_code_from_int(int code) {
    if (code < 1 || code > 6) {
        throw DataError("transformation code must be in 1..6, got " + std::to_string(code));
    }
    return static_cast<TransformCode>(code);
}

int differencing_order(TransformCode code) noexcept {
    switch (code) {
        case TransformCode::Level:
        case TransformCode::Log:
            return 0;
        case TransformCode::Diff:
        case TransformCode::LogDiff:
            return 1;
        case TransformCode::Diff2:
        case TransformCode::LogDiff2:
            return 2;
    }
    return 0;
}

bool uses_log(TransformCode code) noexcept {
    return code == TransformCode::Log || code == TransformCode::LogDiff ||
           code == TransformCode::LogDiff2;
}

void RawPanel::validate() const {
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (!(dates[i - 1] < dates[i])) {
            throw DataError("dates must be strictly increasing: '" + dates[i - 1] + "' then '" +
                            dates[i] + "'");
        }
    }
    if (series.size() != mnemonics.size()) {
        throw DataError("panel mnemonic list does not match its series map");
    }
    for (const auto& name : mnemonics) {
        const auto it = series.find(name);
        if (it == series.end()) {
            throw DataError("series '" + name + "' listed but not present");
        }
        if (it->second.size() != dates.size()) {
            throw DataError("series '" + name + "' has " + std::to_string(it->second.size()) +
                            " observations, expected " + std::to_string(dates.size()));
        }
        if (!tcodes.contains(name)) {
            throw DataError("series '" + name + "' has no transformation code");
        }
    }
}

std::size_t StationaryPanel::common_start() const {
    std::size_t start = 0;
    for (const auto& [name, lead] : leadingMissing) {
        start = std::max(start, lead);
    }
    return start;
}

Matrix StationaryPanel::matrix(const std::vector<std::string>& names) const {
    const auto& cols = names.empty() ? mnemonics : names;
    Matrix m(static_cast<Eigen::Index>(length()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const auto it = series.find(cols[j]);
        if (it == series.end()) {
            throw ArgumentError("unknown series '" + cols[j] + "'");
        }
        for (std::size_t t = 0; t < length(); ++t) {
            m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = it->second[t];
        }
    }
    return m;
}

std::vector<double> apply_transform(std::span<const double> levels, TransformCode code,
                                    std::string_view series) {
    const int d = differencing_order(code);
    if (levels.size() <= static_cast<std::size_t>(d)) {
        throw ArgumentError("series '" + std::string(series) + "' too short for code " +
                            std::to_string(static_cast<int>(code)));
    }
    std::vector<double> base(levels.begin(), levels.end());
    if (uses_log(code)) {
        for (std::size_t t = 0; t < base.size(); ++t) {
            if (is_missing(base[t])) {
                continue;
            }
            if (!(base[t] > 0.0)) {
                std::ostringstream msg;
                msg << "series '" << series << "' index " << t << ": level " << base[t]
                    << " is not positive under log transformation code "
                    << static_cast<int>(code);
                throw DomainError(msg.str());
            }
            base[t] = std::log(base[t]);
        }
    }
    // Differencing; NaN propagates through missing heads.
    for (int k = 0; k < d; ++k) {
        for (std::size_t t = base.size(); t-- > 0;) {
            base[t] = t == 0 ? kMissing : base[t] - base[t - 1];
        }
        base[static_cast<std::size_t>(k)] = kMissing;
    }
    return base;
}

std::vector<double> build_inflation_target(std::span<const double> price, int horizon) {
    if (horizon <= 0) {
        throw ArgumentError("inflation horizon must be positive, got " + std::to_string(horizon));
    }
    const auto h = static_cast<std::size_t>(horizon);
    const double scale = 1200.0 / static_cast<double>(horizon);
    std::vector<double> out(price.size(), kMissing);
    for (std::size_t t = 0; t < price.size(); ++t) {
        if (!is_missing(price[t]) && !(price[t] > 0.0)) {
            throw DomainError("price level at index " + std::to_string(t) + " is not positive");
        }
        if (t >= h && !is_missing(price[t]) && !is_missing(price[t - h])) {
            out[t] = scale * std::log(price[t] / price[t - h]);
        }
    }
    return out;
}

StationaryPanel to_stationary(const RawPanel& raw) { return to_stationary(raw, raw.mnemonics); }

StationaryPanel to_stationary(const RawPanel& raw, const std::vector<std::string>& keep) {
    raw.validate();
    StationaryPanel out;
    out.dates = raw.dates;
    out.mnemonics = keep;
    for (const auto& name : keep) {
        const auto it = raw.series.find(name);
        if (it == raw.series.end()) {
            throw ArgumentError("unknown series '" + name + "'");
        }
        auto x = apply_transform(it->second, raw.tcodes.at(name), name);
        std::size_t lead = 0;
        while (lead < x.size() && is_missing(x[lead])) {
            ++lead;
        }
        for (std::size_t t = lead; t < x.size(); ++t) {
            if (is_missing(x[t])) {
                throw DataError("series '" + name + "' has an interior missing value at '" +
                                raw.dates[t] + "'");
            }
        }
        out.leadingMissing[name] = lead;
        out.series[name] = std::move(x);
    }
    return out;
}

RawPanel parse_panel_csv(std::istream& in, const std::map<std::string, int>& tcodes,
                         bool defaultLevel) {
    RawPanel panel;
    std::string line;
    std::size_t lineNo = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!trim(line).empty()) {
            header = split_row(line);
            break;
        }
    }
    if (header.empty()) {
        throw DataError("panel CSV is empty");
    }
    std::string first = header.front();
    std::transform(first.begin(), first.end(), first.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (first != "date" && first != "sasdate") {
        throw DataError("first header cell must be 'date', got '" + header.front() + "'");
    }
    if (header.size() < 2) {
        throw DataError("panel CSV has no series columns");
    }
    panel.mnemonics.assign(header.begin() + 1, header.end());
    for (const auto& name : panel.mnemonics) {
        if (name.empty()) {
            throw DataError("empty mnemonic in header");
        }
        if (panel.series.contains(name)) {
            throw DataError("duplicate mnemonic '" + name + "'");
        }
        panel.series[name] = {};
    }

    std::vector<bool> seenValue(panel.mnemonics.size(), false);
    std::vector<bool> gapAfterValue(panel.mnemonics.size(), false);
    while (std::getline(in, line)) {
        ++lineNo;
        if (trim(line).empty()) {
            continue;
        }
        auto cells = split_row(line);
        if (cells.size() != header.size()) {
            throw DataError("line " + std::to_string(lineNo) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()));
        }
        std::string key = cells.front();
        std::transform(key.begin(), key.end(), key.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (key == "transform") {
            if (!panel.dates.empty()) {
                throw DataError("transform row must directly follow the header");
            }
            for (std::size_t j = 1; j < cells.size(); ++j) {
                const double code = parse_real(cells[j], lineNo, header[j]);
                if (code != std::floor(code)) {
                    throw DataError("non-integer transformation code for '" + header[j] + "'");
                }
                panel.tcodes[header[j]] = transform_code_from_int(static_cast<int>(code));
            }
            continue;
        }
        if (!plausible_date(cells.front())) {
            throw DataError("line " + std::to_string(lineNo) + ": '" + cells.front() +
                            "' is not an ISO-8601 date");
        }
        panel.dates.push_back(cells.front());
        for (std::size_t j = 1; j < cells.size(); ++j) {
            const auto& name = header[j];
            double v = kMissing;
            if (!is_missing_token(cells[j])) {
                v = parse_real(cells[j], lineNo, name);
                if (gapAfterValue[j - 1]) {
                    throw DataError("series '" + name + "' has an interior missing value before '" +
                                    cells.front() + "'");
                }
                seenValue[j - 1] = true;
            } else if (seenValue[j - 1]) {
                gapAfterValue[j - 1] = true;
            }
            panel.series[name].push_back(v);
        }
    }
    for (std::size_t j = 0; j < panel.mnemonics.size(); ++j) {
        if (gapAfterValue[j]) {
            throw DataError("series '" + panel.mnemonics[j] + "' has trailing missing values");
        }
        if (!seenValue[j]) {
            throw DataError("series '" + panel.mnemonics[j] + "' has no observations");
        }
    }
    for (const auto& [name, code] : tcodes) {
        if (panel.series.contains(name) && !panel.tcodes.contains(name)) {
            panel.tcodes[name] = transform_code_from_int(code);
        }
    }
    for (const auto& name : panel.mnemonics) {
        if (!panel.tcodes.contains(name)) {
            if (!defaultLevel) {
                throw DataError("no transformation code for series '" + name + "'");
            }
            panel.tcodes[name] = TransformCode::Level;
        }
    }
    panel.validate();
    return panel;
}

std::map<std::string, int> read_tcodes_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open tcodes file " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed tcodes JSON " + path.string() + ": " + e.what());
    }
    if (!j.contains("tcodes") || !j["tcodes"].is_object()) {
        throw DataError("tcodes JSON must contain an object named 'tcodes'");
    }
    std::map<std::string, int> out;
    for (const auto& [name, code] : j["tcodes"].items()) {
        if (!code.is_number_integer()) {
            throw DataError("tcode for '" + name + "' is not an integer");
        }
        out[name] = code.get<int>();
    }
    return out;
}

RawPanel read_panel_csv(const std::filesystem::path& csv,
                        const std::optional<std::filesystem::path>& sidecar, bool defaultLevel) {
    std::ifstream in(csv);
    if (!in) {
        throw DataError("cannot open panel file " + csv.string());
    }
    const auto codes = sidecar ? read_tcodes_json(*sidecar) : std::map<std::string, int>{};
    return parse_panel_csv(in, codes, defaultLevel);
}

void write_panel_csv(const RawPanel& panel, const std::filesystem::path& path) {
    panel.validate();
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << std::setprecision(17) << "date";
    for (const auto& name : panel.mnemonics) {
        out << ',' << name;
    }
    out << "\ntransform";
    for (const auto& name : panel.mnemonics) {
        out << ',' << static_cast<int>(panel.tcodes.at(name));
    }
    out << '\n';
    for (std::size_t t = 0; t < panel.length(); ++t) {
        out << panel.dates[t];
        for (const auto& name : panel.mnemonics) {
            const double v = panel.series.at(name)[t];
            out << ',';
            if (!is_missing(v)) {
                out << v;
            }
        }
        out << '\n';
    }
}

RegressionFrame make_regression_frame(std::span<const double> priceLevel, const Matrix& predictors,
                                      const FrameSpec& spec) {
    if (spec.horizon <= 0) {
        throw ArgumentError("forecast horizon must be positive");
    }
    if (spec.ownLags < 0) {
        throw ArgumentError("ownLags must be non-negative");
    }
    const std::size_t n = priceLevel.size();
    const bool usePredictors = predictors.cols() > 0 && !spec.predictorLags.empty();
    if (usePredictors && static_cast<std::size_t>(predictors.rows()) != n) {
        throw ArgumentError("predictor rows (" + std::to_string(predictors.rows()) +
                            ") do not match the price series length (" + std::to_string(n) + ")");
    }
    for (int lag : spec.predictorLags) {
        if (lag < 0) {
            throw ArgumentError("predictor lags must be non-negative");
        }
    }

    const auto pi1 = build_inflation_target(priceLevel, 1);
    const auto pih = build_inflation_target(priceLevel, spec.horizon);
    const auto h = static_cast<std::size_t>(spec.horizon);
    const bool gap = spec.form == TargetForm::Gap;

    auto own = [&](std::size_t t, int lag) -> double {
        const auto l = static_cast<std::size_t>(lag);
        if (t < l) {
            return kMissing;
        }
        if (!gap) {
            return pi1[t - l];
        }
        if (t < l + 1) {
            return kMissing;
        }
        return pi1[t - l] - pi1[t - l - 1];
    };

    const std::size_t nPred = usePredictors ? static_cast<std::size_t>(predictors.cols()) : 0;
    const std::size_t nOwnCols = (spec.intercept ? 1U : 0U) + static_cast<std::size_t>(spec.ownLags);
    const std::size_t nCols = nOwnCols + nPred * (usePredictors ? spec.predictorLags.size() : 0);

    auto row_values = [&](std::size_t t, std::vector<double>& row) -> bool {
        row.clear();
        if (spec.intercept) {
            row.push_back(1.0);
        }
        for (int l = 0; l < spec.ownLags; ++l) {
            row.push_back(own(t, l));
        }
        if (usePredictors) {
            for (int lag : spec.predictorLags) {
                const auto l = static_cast<std::size_t>(lag);
                for (std::size_t k = 0; k < nPred; ++k) {
                    row.push_back(t < l ? kMissing
                                        : predictors(static_cast<Eigen::Index>(t - l),
                                                     static_cast<Eigen::Index>(k)));
                }
            }
        }
        // the gap target subtracts pi_t, which must exist at the regressor date
        bool complete = !(gap && is_missing(pi1[t]));
        for (double v : row) {
            complete = complete && !is_missing(v);
        }
        return complete;
    };

    std::vector<double> row;
    std::size_t first = n;
    for (std::size_t t = 0; t < n; ++t) {
        if (row_values(t, row)) {
            first = t;
            break;
        }
    }
    if (first == n) {
        throw DataError("no row has a complete set of regressors");
    }

    RegressionFrame frame;
    frame.horizon = spec.horizon;
    frame.form = spec.form;
    frame.nUnshrunk = nOwnCols;
    frame.X.resize(static_cast<Eigen::Index>(n - first), static_cast<Eigen::Index>(nCols));
    frame.y.resize(static_cast<Eigen::Index>(n - first));
    frame.pi.resize(static_cast<Eigen::Index>(n - first));
    for (std::size_t t = first; t < n; ++t) {
        const auto r = static_cast<Eigen::Index>(t - first);
        if (!row_values(t, row)) {
            throw DataError("missing regressor value at row " + std::to_string(t) +
                            " after the first complete row");
        }
        for (std::size_t j = 0; j < nCols; ++j) {
            frame.X(r, static_cast<Eigen::Index>(j)) = row[j];
        }
        frame.rowIndex.push_back(t);
        frame.pi(r) = pi1[t];
        double target = kMissing;
        if (t + h < n && !is_missing(pih[t + h])) {
            target = gap ? pih[t + h] - pi1[t] : pih[t + h];
        }
        frame.y(r) = target;
    }
    while (frame.nTrain < frame.rowIndex.size() &&
           !is_missing(frame.y(static_cast<Eigen::Index>(frame.nTrain)))) {
        ++frame.nTrain;
    }
    for (std::size_t r = frame.nTrain; r < frame.rowIndex.size(); ++r) {
        if (!is_missing(frame.y(static_cast<Eigen::Index>(r)))) {
            throw DataError("target observed after a missing target; price series has gaps");
        }
    }
    if (frame.nTrain == 0) {
        throw DataError("regression frame has no row with an observed target");
    }

    if (spec.intercept) {
        frame.columnNames.emplace_back("const");
    }
    for (int l = 0; l < spec.ownLags; ++l) {
        frame.columnNames.push_back((gap ? "dpi_lag" : "pi_lag") + std::to_string(l));
    }
    if (usePredictors) {
        for (int lag : spec.predictorLags) {
            for (std::size_t k = 0; k < nPred; ++k) {
                frame.columnNames.push_back("f" + std::to_string(k + 1) + "_lag" +
                                            std::to_string(lag));
            }
        }
    }
    return frame;
}

}  // namespace tvpgamp
