#include "tvpgamp/gamp.hpp"

#include "tvpgamp/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <string>

namespace tvpgamp {

namespace {

using quad = __float128;

void apply_damping(Vector& current, const Vector& previous, double damping) {
    current = damping * current + (1.0 - damping) * previous;
}

}  // namespace

void GampConfig::validate() const {
    if (!(damping > 0.0 && damping <= 1.0)) {
        throw ArgumentError("damping must lie in (0, 1]");
    }
    if (!(tol > 0.0)) {
        throw ArgumentError("tolerance must be positive");
    }
    if (!(alphaMin > 0.0 && alphaMin < alphaMax)) {
        throw ArgumentError("need 0 < alphaMin < alphaMax");
    }
    if (!(alphaInit > 0.0) || !(tauBetaInit > 0.0) || !(sigma2 > 0.0)) {
        throw ArgumentError("initial precision, variance and noise variance must be positive");
    }
    if (a < 0.0 || b < 0.0) {
        throw ArgumentError("prior hyperparameters a, b must be non-negative");
    }
    if (maxIter == 0) {
        throw ArgumentError("maxIter must be at least 1");
    }
}

OutputMessages gamp_output_step(double cHat, double tauC, double y, double sigma2) {
    if (!(tauC > 0.0) || !(sigma2 > 0.0)) {
        throw NumericalError("output step needs tauC > 0 and sigma2 > 0");
    }
    const quad c = cHat;
    const quad tc = tauC;
    const quad s2 = sigma2;
    const quad tz = tc * s2 / (tc + s2);
    const quad z = c + tz * (quad(y) - c) / s2;
    const quad s = (z - c) / tc;
    const quad ts = (quad(1) - tz / tc) / tc;
    return {static_cast<double>(z), static_cast<double>(tz), static_cast<double>(s),
            static_cast<double>(ts)};
}

OutputMessages gamp_output_step_reduced(double cHat, double tauC, double y, double sigma2) {
    if (!(tauC > 0.0) || !(sigma2 > 0.0)) {
        throw NumericalError("output step needs tauC > 0 and sigma2 > 0");
    }
    const double total = tauC + sigma2;
    return {(tauC * y + sigma2 * cHat) / total, tauC * sigma2 / total, (y - cHat) / total,
            1.0 / total};
}

InputMessages gamp_input_step(double dHat, double precD, double alpha) {
    if (precD < 0.0 || alpha < 0.0) {
        throw NumericalError("input step needs precD >= 0 and alpha >= 0");
    }
    const double total = alpha + precD;
    if (!(total > 0.0)) {
        throw NumericalError("degenerate posterior: alpha + precD = 0");
    }
    if (precD == 0.0) {
        return {0.0, 1.0 / alpha};
    }
    return {precD * dHat / total, 1.0 / total};
}

double em_alpha_update(double betaHat, double tauBeta, const GampConfig& cfg) {
    const double b2 = betaHat * betaHat;
    double raw = 0.0;
    if (cfg.alphaUpdateMode == AlphaUpdateMode::GammaMode) {
        raw = (2.0 * cfg.a - 1.0) / (2.0 * cfg.b + b2);
    } else {
        raw = (2.0 * cfg.a + 1.0) / (2.0 * cfg.b + b2 + std::max(tauBeta, 0.0));
    }
    if (std::isnan(raw)) {
        return cfg.alphaMax;
    }
    return std::clamp(raw, cfg.alphaMin, cfg.alphaMax);
}

GampResult gamp_solve(const DesignOperator& A, const Vector& y, const GampConfig& cfg) {
    cfg.validate();
    const Eigen::Index T = A.rows();
    const Eigen::Index q = A.cols();
    if (y.size() != T) {
        throw ArgumentError("response has length " + std::to_string(y.size()) +
                            " but the design has " + std::to_string(T) + " rows");
    }
    if (!y.allFinite()) {
        throw ArgumentError("response contains non-finite values");
    }

    for (Eigen::Index i : cfg.noShrinkColumns) {
        if (i < 0 || i >= q) {
            throw ArgumentError("noShrink column " + std::to_string(i) + " out of range");
        }
    }

    GampResult result;
    GampState& st = result.state;
    st.betaHat = Vector::Zero(q);
    st.tauBeta = Vector::Constant(q, cfg.tauBetaInit);
    st.sHat = Vector::Zero(T);
    st.tauS = Vector::Zero(T);
    st.cHat = Vector::Zero(T);
    st.tauC = Vector::Zero(T);
    st.zHat = Vector::Zero(T);
    st.tauZ = Vector::Zero(T);
    st.dHat = Vector::Zero(q);
    st.precD = Vector::Zero(q);
    st.alpha = Vector::Constant(q, cfg.alphaInit);
    for (Eigen::Index i : cfg.noShrinkColumns) {
        st.alpha(i) = cfg.alphaMin;
    }
    st.sigma2 = Vector::Constant(T, cfg.sigma2);

    Vector fitted(T);
    Vector sNew(T);
    Vector tauSNew(T);
    Vector corr(q);
    Vector betaNew(q);
    Vector tauBetaNew(q);
    Vector residual(T);

    const double alphaNumerator =
        cfg.alphaUpdateMode == AlphaUpdateMode::GammaMode ? 2.0 * cfg.a - 1.0 : 2.0 * cfg.a + 1.0;
    const bool meanMode = cfg.alphaUpdateMode == AlphaUpdateMode::Mean;
    Vector total(std::max(T, q));

    for (std::size_t r = 1; r <= cfg.maxIter; ++r) {
        // output messages, reduced closed form evaluated over all rows at once
        A.forward_sq(st.tauBeta, st.tauC);
        A.forward(st.betaHat, fitted);
        st.cHat = fitted - st.sHat.cwiseProduct(st.tauC);
        if (!(st.tauC.array() > 0.0).all() || !(st.sigma2.array() > 0.0).all()) {
            throw NumericalError("output step needs tauC > 0 and sigma2 > 0 (iteration " +
                                 std::to_string(r) + ")");
        }
        auto tot = total.head(T).array();
        tot = st.tauC.array() + st.sigma2.array();
        st.zHat.array() = (st.tauC.array() * y.array() + st.sigma2.array() * st.cHat.array()) / tot;
        st.tauZ.array() = st.tauC.array() * st.sigma2.array() / tot;
        sNew.array() = (y.array() - st.cHat.array()) / tot;
        tauSNew.array() = tot.inverse();
        if (r > 1) {
            apply_damping(sNew, st.sHat, cfg.damping);
            apply_damping(tauSNew, st.tauS, cfg.damping);
        }
        st.sHat = sNew;
        st.tauS = tauSNew;

        // input messages
        A.adjoint_sq(st.tauS, st.precD);
        A.adjoint(st.sHat, corr);
        const auto pd = st.precD.array();
        st.dHat.array() = (pd > 0.0).select(st.betaHat.array() + corr.array() / pd, st.betaHat.array());
        auto totq = total.head(q).array();
        totq = st.alpha.array() + pd;
        if ((pd < 0.0).any() || !(totq > 0.0).all()) {
            throw NumericalError("degenerate posterior: alpha + precD <= 0 (iteration " +
                                 std::to_string(r) + ")");
        }
        betaNew.array() = (pd > 0.0).select(pd * st.dHat.array() / totq, 0.0);
        tauBetaNew.array() = totq.inverse();
        if (r > 1) {
            apply_damping(betaNew, st.betaHat, cfg.damping);
            apply_damping(tauBetaNew, st.tauBeta, cfg.damping);
        }
        const double maxDelta = (betaNew - st.betaHat).lpNorm<Eigen::Infinity>();
        st.betaHat = betaNew;
        st.tauBeta = tauBetaNew;
        st.iter = r;

        const double maxAbs = st.betaHat.lpNorm<Eigen::Infinity>();
        if (!std::isfinite(maxAbs) || !st.tauBeta.allFinite() || maxAbs > cfg.divergenceThreshold) {
            throw DivergenceError("GAMP diverged at iteration " + std::to_string(r) +
                                      " (max |beta| = " + std::to_string(maxAbs) + ")",
                                  r);
        }

        // prior precisions
        if (cfg.updateAlpha) {
            auto denom = total.head(q).array();
            denom = 2.0 * cfg.b + st.betaHat.array().square();
            if (meanMode) {
                denom += st.tauBeta.array().max(0.0);
            }
            st.alpha.array() = alphaNumerator / denom;
            for (Eigen::Index i = 0; i < q; ++i) {
                const double raw = st.alpha(i);
                st.alpha(i) = std::isnan(raw) ? cfg.alphaMax : std::clamp(raw, cfg.alphaMin, cfg.alphaMax);
            }
            for (Eigen::Index i : cfg.noShrinkColumns) {
                st.alpha(i) = cfg.alphaMin;
            }
        }

        // noise variance
        A.forward(st.betaHat, fitted);
        residual = y - fitted;
        switch (cfg.varianceMode) {
            case VarianceMode::KnownConstant:
                break;
            case VarianceMode::EmConstant:
                st.sigma2.setConstant(em_constant_variance(residual, cfg.c1, cfg.c2));
                break;
            case VarianceMode::StochasticVolatility:
                st.sigma2 = sv_update(residual, MixtureTable::standard(), cfg.svEstimator).sigma2;
                break;
        }

        result.trace.push_back({r, maxDelta, residual.squaredNorm()});
        if (maxDelta < cfg.tol) {
            st.converged = true;
            break;
        }
    }

    A.forward(st.betaHat, fitted);
    residual = y - fitted;
    result.volatility = sv_update(residual, MixtureTable::standard(), cfg.svEstimator);
    result.volatility.sigma2 = st.sigma2;

    if (const auto* tvp = dynamic_cast<const TvpDesignOperator*>(&A)) {
        result.path = CoefficientPath::from_static(*tvp, st.betaHat);
    } else {
        result.path = CoefficientPath::constant_path(st.betaHat, T);
    }
    if (cfg.tracePath) {
        write_trace_csv(result.trace, *cfg.tracePath);
    }
    return result;
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << std::setprecision(17) << "iteration,max_delta,residual_ss\n";
    for (const auto& row : trace) {
        out << row.iteration << ',' << row.maxDelta << ',' << row.residualSS << '\n';
    }
}

}  // namespace tvpgamp
