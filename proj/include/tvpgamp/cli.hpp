#pragma once

#include "tvpgamp/dgp.hpp"
#include "tvpgamp/forecast.hpp"
#include "tvpgamp/gamp.hpp"
#include "tvpgamp/oracles.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tvpgamp {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitData = 3,
    kExitNumerical = 4,
};

/// Everything one invocation needs. Enum-valued settings are kept as strings
/// until resolve() so that config files and flags share one spelling.
struct RunConfig {
    std::string subcommand;
    std::filesystem::path out = ".";
    std::uint64_t seed = 0;
    std::size_t threads = 1;

    std::string simKind = "sparseRegression";  // or macroPanel
    SimSpec sim;
    std::size_t reps = 1;
    MacroPanelSpec macro;
    std::string estimators;  // comma separated, empty = defaults

    GampConfig gamp;
    std::string variance = "auto";  // auto|known|em|sv
    std::string alphaMode = "mean";
    std::string svEstimator = "damped";

    GibbsConfig gibbs;

    ForecastSpec forecast;
    std::string form = "gap";
    std::string model = "tvpGamp";

    std::filesystem::path data;
    std::string target = "y";
    bool staticFit = false;
    std::filesystem::path panel;
    std::filesystem::path tcodes;
    bool defaultLevel = false;
    std::filesystem::path forecasts;
    std::filesystem::path benchmark;

    /// Copies the string settings into the typed blocks and spreads the
    /// master seed. Throws ArgumentError on unknown names.
    void resolve();
};

nlohmann::json to_json(const RunConfig& cfg);
/// Overwrites only the keys present in `j`; accepts a manifest (uses its
/// "config" member) as well as a bare config.
void merge_json(RunConfig& cfg, const nlohmann::json& j);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Numeric CSV with a header row; every cell must parse.
struct NumericTable {
    std::vector<std::string> names;
    Matrix values;
};
NumericTable read_numeric_csv(const std::filesystem::path& path);

/// Entry point behind the executable. Returns an ExitCode.
int run_cli(int argc, const char* const* argv);

}  // namespace tvpgamp
