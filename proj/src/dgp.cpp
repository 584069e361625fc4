#include "tvpgamp/dgp.hpp"

#include "tvpgamp/error.hpp"
#include "tvpgamp/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

namespace tvpgamp {

namespace {

std::string month_stamp(std::size_t index) {
    const std::size_t year = 1960 + index / 12;
    const std::size_t month = 1 + index % 12;
    char buf[48];
    std::snprintf(buf, sizeof buf, "%04zu-%02zu-01", year, month);
    return buf;
}

SimOutput local_level_output(SimKind kind, const Vector& c, Rng& rng) {
    SimOutput out;
    out.kind = kind;
    const Eigen::Index T = c.size();
    out.X = Matrix::Ones(T, 1);
    out.trueCoefPath = c;
    out.y.resize(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        out.y(t) = c(t) + rng.normal();
    }
    return out;
}

}  // namespace

std::string to_string(SimKind kind) {
    switch (kind) {
        case SimKind::PoissonJumps:
            return "poissonJumps";
        case SimKind::RegressionEffects:
            return "regressionEffects";
        case SimKind::RandomWalk:
            return "randomWalk";
        case SimKind::SparseRegression:
            return "sparseRegression";
        case SimKind::Ar4:
            return "ar4";
    }
    return "unknown";
}

SimKind sim_kind_from_string(const std::string& name) {
    std::string key;
    for (char ch : name) {
        if (ch != '-' && ch != '_') {
            key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        }
    }
    if (key == "poissonjumps" || key == "dgp1") {
        return SimKind::PoissonJumps;
    }
    if (key == "regressioneffects" || key == "dgp2") {
        return SimKind::RegressionEffects;
    }
    if (key == "randomwalk" || key == "dgp3") {
        return SimKind::RandomWalk;
    }
    if (key == "sparseregression" || key == "sparse") {
        return SimKind::SparseRegression;
    }
    if (key == "ar4") {
        return SimKind::Ar4;
    }
    throw ArgumentError("unknown simulation kind '" + name + "'");
}

void SimSpec::validate() const {
    if (T < 2) {
        throw ArgumentError("simulation length T must be at least 2");
    }
    if (!(rho >= 0.0 && rho < 1.0)) {
        throw ArgumentError("rho must lie in [0, 1)");
    }
    if (kind == SimKind::SparseRegression) {
        if (p == 0) {
            throw ArgumentError("sparse regression needs p > 0");
        }
        if (!(sparsity > 0.0 && sparsity < 1.0)) {
            throw ArgumentError("sparsity c must lie in (0, 1)");
        }
    }
    if (kind == SimKind::PoissonJumps && !(lambda > 0.0)) {
        throw ArgumentError("Poisson intensity must be positive");
    }
}

SimOutput simulate(const SimSpec& spec, std::uint64_t replication) {
    switch (spec.kind) {
        case SimKind::PoissonJumps:
            return simulate_poisson_jumps(spec, replication);
        case SimKind::RegressionEffects:
            return simulate_regression_effects(spec, replication);
        case SimKind::RandomWalk:
            return simulate_random_walk(spec, replication);
        case SimKind::SparseRegression:
            return simulate_sparse_regression(spec, replication);
        case SimKind::Ar4:
            return simulate_ar4(spec, replication);
    }
    throw ArgumentError("unknown simulation kind");
}

SimOutput simulate_poisson_jumps(const SimSpec& spec, std::uint64_t replication) {
    spec.validate();
    Rng rng(spec.seed, replication);
    const auto T = static_cast<Eigen::Index>(spec.T);
    const double sd = std::pow(static_cast<double>(spec.T), -3.0 / 8.0);  // var T^{-3/4}
    SimMeta meta;
    meta.mu = rng.uniform(0.0, 4.0);
    meta.poissonCounts.resize(spec.T);
    meta.jumpSigns.resize(spec.T);
    meta.stateNoise.resize(T);
    Vector c(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        const auto i = static_cast<std::size_t>(t);
        const int k = rng.poisson(spec.lambda);
        const double delta = rng.uniform(-1.0, 1.0);
        const int sign = delta < 0.0 ? -1 : 1;
        const double u = sd * rng.normal();
        meta.poissonCounts[i] = k;
        meta.jumpSigns[i] = sign;
        meta.stateNoise(t) = u;
        if (k > 0) {
            meta.jumpTimes.push_back(i);
        }
        c(t) = meta.mu + sign * meta.mu * k + u;
    }
    auto out = local_level_output(SimKind::PoissonJumps, c, rng);
    meta.seed = spec.seed;
    meta.replication = replication;
    out.meta = std::move(meta);
    return out;
}

SimOutput simulate_regression_effects(const SimSpec& spec, std::uint64_t replication) {
    spec.validate();
    Rng rng(spec.seed, replication);
    const auto T = static_cast<Eigen::Index>(spec.T);
    constexpr Eigen::Index kRegressors = 10;
    const double sd = std::pow(static_cast<double>(spec.T), -3.0 / 8.0);
    SimMeta meta;
    meta.exogenousCoefs.resize(kRegressors + 1);
    for (Eigen::Index j = 0; j <= kRegressors; ++j) {
        meta.exogenousCoefs(j) = rng.uniform(-1.0, 1.0);
    }
    meta.exogenous.resize(T, kRegressors);
    meta.stateNoise.resize(T);
    Vector c(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        double v = meta.exogenousCoefs(0);
        for (Eigen::Index j = 0; j < kRegressors; ++j) {
            meta.exogenous(t, j) = rng.normal();
            v += meta.exogenousCoefs(j + 1) * meta.exogenous(t, j);
        }
        meta.stateNoise(t) = sd * rng.normal();
        c(t) = v + meta.stateNoise(t);
    }
    auto out = local_level_output(SimKind::RegressionEffects, c, rng);
    meta.seed = spec.seed;
    meta.replication = replication;
    out.meta = std::move(meta);
    return out;
}

SimOutput simulate_random_walk(const SimSpec& spec, std::uint64_t replication) {
    spec.validate();
    Rng rng(spec.seed, replication);
    const auto T = static_cast<Eigen::Index>(spec.T);
    const double sd = std::pow(static_cast<double>(spec.T), -1.0 / 4.0);  // var T^{-1/2}
    SimMeta meta;
    meta.c0 = rng.uniform(-1.0, 1.0);
    meta.stateNoise.resize(T);
    Vector c(T);
    double prev = meta.c0;
    for (Eigen::Index t = 0; t < T; ++t) {
        meta.stateNoise(t) = sd * rng.normal();
        prev += meta.stateNoise(t);
        c(t) = prev;
    }
    auto out = local_level_output(SimKind::RandomWalk, c, rng);
    meta.seed = spec.seed;
    meta.replication = replication;
    out.meta = std::move(meta);
    return out;
}

std::size_t active_count(std::size_t p, double sparsity) {
    return static_cast<std::size_t>(std::llround(sparsity * static_cast<double>(p)));
}

Matrix toeplitz_correlation(std::size_t p, double rho) {
    const auto n = static_cast<Eigen::Index>(p);
    Matrix S(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            S(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
        }
    }
    return S;
}

SimOutput simulate_sparse_regression(const SimSpec& spec, std::uint64_t replication) {
    spec.validate();
    Rng rng(spec.seed, replication);
    const auto T = static_cast<Eigen::Index>(spec.T);
    const auto p = static_cast<Eigen::Index>(spec.p);

    SimOutput out;
    out.kind = SimKind::SparseRegression;
    Matrix Z(T, p);
    for (Eigen::Index t = 0; t < T; ++t) {
        for (Eigen::Index j = 0; j < p; ++j) {
            Z(t, j) = rng.normal();
        }
    }
    const Eigen::LLT<Matrix> llt(toeplitz_correlation(spec.p, spec.rho));
    if (llt.info() != Eigen::Success) {
        throw NumericalError("predictor correlation matrix is not positive definite");
    }
    out.X = Z * llt.matrixL().transpose();
    if (spec.orthogonalize) {
        out.X = orthogonalize(out.X);
    }

    const std::size_t q = active_count(spec.p, spec.sparsity);
    out.trueCoef = Vector::Zero(p);
    for (std::size_t j = 0; j < q; ++j) {
        out.trueCoef(static_cast<Eigen::Index>(j)) = rng.uniform(-4.0, 4.0);
        out.meta.activeSet.push_back(j);
    }
    if (q == 0) {
        out.meta.warnings.emplace_back("round(c * p) = 0: no active predictors");
    }
    out.y = out.X * out.trueCoef;
    for (Eigen::Index t = 0; t < T; ++t) {
        out.y(t) += rng.normal();
    }
    out.meta.seed = spec.seed;
    out.meta.replication = replication;
    return out;
}

Vector ar_recursion(const std::vector<double>& coefs, const Vector& innovations) {
    Vector y(innovations.size());
    for (Eigen::Index t = 0; t < innovations.size(); ++t) {
        double v = innovations(t);
        for (std::size_t k = 0; k < coefs.size(); ++k) {
            const auto lag = static_cast<Eigen::Index>(k + 1);
            if (t >= lag) {
                v += coefs[k] * y(t - lag);
            }
        }
        y(t) = v;
    }
    return y;
}

double companion_spectral_radius(const std::vector<double>& coefs) {
    const auto k = static_cast<Eigen::Index>(coefs.size());
    if (k == 0) {
        return 0.0;
    }
    Matrix C = Matrix::Zero(k, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        C(0, j) = coefs[static_cast<std::size_t>(j)];
    }
    for (Eigen::Index i = 1; i < k; ++i) {
        C(i, i - 1) = 1.0;
    }
    return Eigen::EigenSolver<Matrix>(C, false).eigenvalues().cwiseAbs().maxCoeff();
}

SimOutput simulate_ar4(const SimSpec& spec, std::uint64_t replication) {
    spec.validate();
    Rng rng(spec.seed, replication);
    const std::vector<double> coefs(kAr4Coefficients.begin(), kAr4Coefficients.end());
    const auto lags = static_cast<Eigen::Index>(coefs.size());
    const auto T = static_cast<Eigen::Index>(spec.T);
    const auto total = static_cast<Eigen::Index>(kAr4BurnIn) + T;
    Vector eps(total);
    for (Eigen::Index t = 0; t < total; ++t) {
        eps(t) = rng.normal();
    }
    const Vector path = ar_recursion(coefs, eps);

    SimOutput out;
    out.kind = SimKind::Ar4;
    const auto start = static_cast<Eigen::Index>(kAr4BurnIn);
    out.y = path.segment(start, T);
    // lag columns reach into the discarded burn-in, so every row is complete
    out.X.resize(T, lags);
    for (Eigen::Index t = 0; t < T; ++t) {
        for (Eigen::Index k = 0; k < lags; ++k) {
            out.X(t, k) = path(start + t - k - 1);
        }
    }
    out.trueCoef = Eigen::Map<const Vector>(coefs.data(), lags);
    out.meta.seed = spec.seed;
    out.meta.replication = replication;
    return out;
}

Matrix orthogonalize(const Matrix& X) {
    const Eigen::Index T = X.rows();
    const Eigen::Index p = X.cols();
    if (T < p || T < 2) {
        throw RankError("orthogonalization needs T >= p (got T = " + std::to_string(T) +
                        ", p = " + std::to_string(p) + "): the covariance factor is rank deficient");
    }
    const Matrix centered = X.rowwise() - X.colwise().mean();
    const Matrix omega = centered.transpose() * centered / static_cast<double>(T - 1);
    const Eigen::LLT<Matrix> llt(omega);
    if (llt.info() != Eigen::Success) {
        throw RankError("sample covariance is not positive definite; cannot orthogonalize");
    }
    const Vector diag = Matrix(llt.matrixL()).diagonal();
    if (diag.minCoeff() <= 1e-12 * diag.maxCoeff()) {
        throw RankError("sample covariance is numerically rank deficient");
    }
    // X W^{-1} with W = L' upper triangular: solve W' Z' = X' for Z
    const Matrix Xt = llt.matrixL().solve(X.transpose());
    return Xt.transpose();
}

MacroPanel simulate_macro_panel(const MacroPanelSpec& spec, std::uint64_t replication) {
    if (spec.T < 24 || spec.nFactors == 0 || spec.nSeries < spec.nFactors) {
        throw ArgumentError("macro panel needs T >= 24 and nSeries >= nFactors > 0");
    }
    Rng rng(spec.seed, replication);
    const auto T = static_cast<Eigen::Index>(spec.T);
    const auto K = static_cast<Eigen::Index>(spec.nFactors);
    const auto N = static_cast<Eigen::Index>(spec.nSeries);
    const double phi = spec.factorPersistence;
    const double innovSd = std::sqrt(1.0 - phi * phi);

    MacroPanel out;
    out.factors.resize(T, K);
    for (Eigen::Index k = 0; k < K; ++k) {
        double f = rng.normal();
        for (Eigen::Index t = 0; t < T; ++t) {
            f = phi * f + innovSd * rng.normal();
            out.factors(t, k) = f;
        }
    }
    Matrix loadings(N, K);
    for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index k = 0; k < K; ++k) {
            loadings(i, k) = rng.normal();
        }
    }

    out.coefficients.resize(T, K);
    Vector theta(K);
    for (Eigen::Index k = 0; k < K; ++k) {
        theta(k) = rng.uniform(-1.0, 1.0);
    }
    std::vector<double> price(spec.T);
    double level = 100.0;
    double monthly = 2.0;
    for (Eigen::Index t = 0; t < T; ++t) {
        for (Eigen::Index k = 0; k < K; ++k) {
            theta(k) += spec.coefDrift * rng.normal();
        }
        out.coefficients.row(t) = theta.transpose();
        double signal = 0.0;
        if (t > 0) {
            signal = out.factors.row(t - 1).dot(theta);
        }
        monthly = 2.0 + 0.3 * (monthly - 2.0) + signal + spec.inflationNoise * rng.normal();
        level *= std::exp(monthly / 1200.0);
        price[static_cast<std::size_t>(t)] = level;
    }

    auto& panel = out.panel;
    for (std::size_t t = 0; t < spec.T; ++t) {
        panel.dates.push_back(month_stamp(t));
    }
    for (Eigen::Index i = 0; i < N; ++i) {
        const std::string name = "X" + std::to_string(i + 1);
        std::vector<double> values(spec.T);
        for (Eigen::Index t = 0; t < T; ++t) {
            values[static_cast<std::size_t>(t)] =
                loadings.row(i).dot(out.factors.row(t)) + rng.normal();
        }
        panel.mnemonics.push_back(name);
        panel.series[name] = std::move(values);
        panel.tcodes[name] = TransformCode::Level;
    }
    panel.mnemonics.push_back(spec.priceName);
    panel.series[spec.priceName] = std::move(price);
    panel.tcodes[spec.priceName] = TransformCode::LogDiff2;
    panel.validate();
    return out;
}

}  // namespace tvpgamp
