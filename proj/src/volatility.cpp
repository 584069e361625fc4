#include "tvpgamp/volatility.hpp"

#include "tvpgamp/error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

namespace tvpgamp {

double MixtureTable::weight_sum() const noexcept {
    double s = 0.0;
    for (const auto& c : components) {
        s += c.weight;
    }
    return s;
}

double MixtureTable::weighted_mean() const noexcept {
    double s = 0.0;
    for (const auto& c : components) {
        s += c.weight * c.mean;
    }
    return s;
}

const MixtureTable& MixtureTable::standard() {
    static const MixtureTable table{{{
        {0.00730, -10.12999, 5.79596},
        {0.10556, -3.97281, 2.61369},
        {0.00002, -8.56686, 5.17950},
        {0.04395, 2.77786, 0.16735},
        {0.34001, 0.61942, 0.64009},
        {0.24566, 1.79518, 0.34023},
        {0.25750, -1.08819, 1.26261},
    }}};
    return table;
}

VolatilityPath sv_update(const Vector& residuals, const MixtureTable& table, SvEstimator estimator) {
    VolatilityPath out;
    const Eigen::Index T = residuals.size();
    out.logResiduals.resize(T);
    out.sigma2.resize(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        const double r = residuals(t);
        const double ytilde = std::log(r * r + kLogSquareOffset);
        out.logResiduals(t) = ytilde;
        double logVar = 0.0;
        if (estimator == SvEstimator::Damped) {
            for (const auto& c : table.components) {
                logVar += c.weight * (ytilde - c.mean);
            }
            logVar /= 7.0;
        } else {
            logVar = ytilde - table.weighted_mean();
        }
        out.sigma2(t) = std::exp(logVar);
    }
    return out;
}

double em_constant_variance(const Vector& residuals, double c1, double c2) {
    const double denom = static_cast<double>(residuals.size()) + 2.0 * c1 - 2.0;
    if (!(denom > 0.0)) {
        throw ArgumentError("constant-variance update needs T + 2 c1 - 2 > 0");
    }
    return (2.0 * c2 + residuals.squaredNorm()) / denom;
}

void write_volatility_csv(const VolatilityPath& path, const std::filesystem::path& file,
                          const std::vector<std::string>& dates) {
    std::ofstream out(file);
    if (!out) {
        throw DataError("cannot write " + file.string());
    }
    out << std::setprecision(17) << "date,sigma2\n";
    for (Eigen::Index t = 0; t < path.sigma2.size(); ++t) {
        const auto i = static_cast<std::size_t>(t);
        if (i < dates.size()) {
            out << dates[i];
        } else {
            out << t + 1;
        }
        out << ',' << path.sigma2(t) << '\n';
    }
}

}  // namespace tvpgamp
