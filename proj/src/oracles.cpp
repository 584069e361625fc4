#include "tvpgamp/oracles.hpp"

#include "tvpgamp/error.hpp"
#include "tvpgamp/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <string>

namespace tvpgamp {

namespace {

constexpr double kJitter = 1e-10;

// Cholesky of a symmetric positive definite matrix; one retry with jitter.
Eigen::LLT<Matrix> spd_factor(Matrix M, const char* what) {
    Eigen::LLT<Matrix> llt(M);
    if (llt.info() == Eigen::Success) {
        return llt;
    }
    M.diagonal().array() += kJitter;
    llt.compute(M);
    if (llt.info() != Eigen::Success) {
        throw NumericalError(std::string(what) + " is not positive definite");
    }
    return llt;
}

// mean + L^{-T} z * scale, a draw from N(mean, scale^2 (LL')^{-1})
Vector gaussian_draw(const Eigen::LLT<Matrix>& llt, const Vector& mean, double scale, Rng& rng) {
    Vector z(mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        z(i) = rng.normal();
    }
    const Vector dev = llt.matrixU().solve(z);
    return mean + scale * dev;
}

double log_normal_density(double x, double variance) {
    return -0.5 * std::log(2.0 * std::numbers::pi * variance) - 0.5 * x * x / variance;
}

void check_xy(const Matrix& X, const Vector& y) {
    if (X.rows() != y.size()) {
        throw ArgumentError("X has " + std::to_string(X.rows()) + " rows but y has length " +
                            std::to_string(y.size()));
    }
    if (X.cols() == 0) {
        throw ArgumentError("design has no columns");
    }
}

}  // namespace

Vector ols(const Matrix& X, const Vector& y) {
    check_xy(X, y);
    const Eigen::ColPivHouseholderQR<Matrix> qr(X);
    if (qr.rank() < X.cols()) {
        throw RankError("X'X is singular (rank " + std::to_string(qr.rank()) + " < " +
                        std::to_string(X.cols()) + ")");
    }
    return qr.solve(y);
}

Vector ols_per_predictor(const Matrix& X, const Vector& y) {
    check_xy(X, y);
    Vector beta(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double xx = X.col(j).squaredNorm();
        if (!(xx > 0.0)) {
            throw RankError("column " + std::to_string(j) + " is identically zero");
        }
        beta(j) = X.col(j).dot(y) / xx;
    }
    return beta;
}

GaussianPosterior exact_gaussian_posterior(const Matrix& X, const Vector& y, const Vector& alpha,
                                           double sigma2) {
    check_xy(X, y);
    if (X.cols() > kExactPosteriorMaxColumns) {
        throw ArgumentError("exact posterior limited to " +
                            std::to_string(kExactPosteriorMaxColumns) + " columns");
    }
    if (alpha.size() != X.cols()) {
        throw ArgumentError("alpha must have one entry per column");
    }
    if (!(sigma2 > 0.0) || (alpha.array() < 0.0).any()) {
        throw ArgumentError("need sigma2 > 0 and alpha >= 0");
    }
    Matrix P = X.transpose() * X / sigma2;
    P.diagonal() += alpha;
    const auto llt = spd_factor(P, "posterior precision");
    GaussianPosterior out;
    out.mean = llt.solve(X.transpose() * y / sigma2);
    const Matrix cov = llt.solve(Matrix::Identity(X.cols(), X.cols()));
    out.variance = cov.diagonal();
    return out;
}

void GibbsConfig::validate() const {
    if (nSave == 0 || nBurn == 0) {
        throw ArgumentError("nSave and nBurn must be positive");
    }
    if (!(ssvs.tau0 > 0.0 && ssvs.tau0 < ssvs.tau1)) {
        throw ArgumentError("need 0 < tau0 < tau1");
    }
    if (!(ssvs.pi0 >= 0.0 && ssvs.pi0 <= 1.0)) {
        throw ArgumentError("inclusion probability must lie in [0, 1]");
    }
    if (!(lasso.r > 0.0 && lasso.delta > 0.0)) {
        throw ArgumentError("LASSO hyperparameters r, delta must be positive");
    }
}

PosteriorDraws gibbs_lasso(const Matrix& X, const Vector& y, const GibbsConfig& cfg) {
    cfg.validate();
    check_xy(X, y);
    const Eigen::Index T = X.rows();
    const Eigen::Index p = X.cols();
    if (T <= 2) {
        throw ArgumentError("Bayesian LASSO needs T > 2");
    }
    Rng rng(cfg.seed, cfg.stream);
    const Matrix XtX = X.transpose() * X;
    const Vector Xty = X.transpose() * y;

    Vector beta = Vector::Zero(p);
    Vector invTau2 = Vector::Ones(p);
    double lambda2 = 1.0;
    double sigma2 = y.squaredNorm() / static_cast<double>(T);
    if (!(sigma2 > 0.0)) {
        sigma2 = 1.0;
    }

    PosteriorDraws out;
    out.beta.resize(static_cast<Eigen::Index>(cfg.nSave), p);
    out.sigma2.resize(static_cast<Eigen::Index>(cfg.nSave));
    out.lambda2.resize(static_cast<Eigen::Index>(cfg.nSave));

    const std::size_t total = cfg.nBurn + cfg.nSave;
    for (std::size_t it = 0; it < total; ++it) {
        // beta | sigma2, tau ~ N(A^{-1}X'y, sigma2 A^{-1}), A = X'X + V^{-1}
        Matrix A = XtX;
        A.diagonal() += invTau2;
        const auto llt = spd_factor(A, "LASSO posterior precision");
        beta = gaussian_draw(llt, llt.solve(Xty), std::sqrt(sigma2), rng);

        // 1/tau_j^2 | beta, sigma2, lambda2 ~ IG(sqrt(lambda2 sigma2 / beta_j^2), lambda2)
        for (Eigen::Index j = 0; j < p; ++j) {
            const double b2 = beta(j) * beta(j);
            const double mu = b2 > 0.0 ? std::sqrt(lambda2 * sigma2 / b2)
                                       : std::numeric_limits<double>::infinity();
            invTau2(j) = rng.inverse_gaussian(mu, lambda2);
        }

        // lambda2 | tau ~ Gamma(p + r, rate sum(tau^2)/2 + delta)
        const double sumTau2 = invTau2.cwiseInverse().sum();
        lambda2 = rng.gamma(static_cast<double>(p) + cfg.lasso.r, 0.5 * sumTau2 + cfg.lasso.delta);

        // sigma2 | beta, tau ~ iGamma((T-1)/2 + p/2, SSR/2 + beta'V^{-1}beta/2)
        const double ssr = (y - X * beta).squaredNorm();
        const double penalty = (beta.array().square() * invTau2.array()).sum();
        sigma2 = rng.inverse_gamma(0.5 * static_cast<double>(T - 1) + 0.5 * static_cast<double>(p),
                                   0.5 * ssr + 0.5 * penalty);

        if (it >= cfg.nBurn) {
            const auto k = static_cast<Eigen::Index>(it - cfg.nBurn);
            out.beta.row(k) = beta.transpose();
            out.sigma2(k) = sigma2;
            out.lambda2(k) = lambda2;
        }
    }
    return out;
}

double ssvs_inclusion_probability(double beta, const SsvsSettings& s) {
    if (s.pi0 <= 0.0) {
        return 0.0;
    }
    if (s.pi0 >= 1.0) {
        return 1.0;
    }
    const double logit = std::log(s.pi0) + log_normal_density(beta, s.tau1 * s.tau1) -
                         std::log1p(-s.pi0) - log_normal_density(beta, s.tau0 * s.tau0);
    return 1.0 / (1.0 + std::exp(-logit));
}

PosteriorDraws gibbs_ssvs(const Matrix& X, const Vector& y, const GibbsConfig& cfg) {
    cfg.validate();
    check_xy(X, y);
    const Eigen::Index T = X.rows();
    const Eigen::Index p = X.cols();
    if (T <= 2) {
        throw ArgumentError("SSVS needs T > 2");
    }
    Rng rng(cfg.seed, cfg.stream);
    const Matrix XtX = X.transpose() * X;
    const Vector Xty = X.transpose() * y;
    const double prec0 = 1.0 / (cfg.ssvs.tau0 * cfg.ssvs.tau0);
    const double prec1 = 1.0 / (cfg.ssvs.tau1 * cfg.ssvs.tau1);

    Vector beta = Vector::Zero(p);
    std::vector<bool> gamma(static_cast<std::size_t>(p), true);
    double sigma2 = y.squaredNorm() / static_cast<double>(T);
    if (!(sigma2 > 0.0)) {
        sigma2 = 1.0;
    }

    PosteriorDraws out;
    out.beta.resize(static_cast<Eigen::Index>(cfg.nSave), p);
    out.sigma2.resize(static_cast<Eigen::Index>(cfg.nSave));
    out.inclusion.resize(static_cast<Eigen::Index>(cfg.nSave), p);

    const std::size_t total = cfg.nBurn + cfg.nSave;
    for (std::size_t it = 0; it < total; ++it) {
        // beta | sigma2, gamma ~ N(P^{-1}X'y/sigma2, P^{-1}), P = X'X/sigma2 + V^{-1}
        Matrix P = XtX / sigma2;
        for (Eigen::Index j = 0; j < p; ++j) {
            P(j, j) += gamma[static_cast<std::size_t>(j)] ? prec1 : prec0;
        }
        const auto llt = spd_factor(P, "SSVS posterior precision");
        beta = gaussian_draw(llt, llt.solve(Xty / sigma2), 1.0, rng);

        for (Eigen::Index j = 0; j < p; ++j) {
            gamma[static_cast<std::size_t>(j)] =
                rng.bernoulli(ssvs_inclusion_probability(beta(j), cfg.ssvs));
        }

        // sigma2 | beta ~ iGamma(T/2, SSR/2)
        const double ssr = (y - X * beta).squaredNorm();
        sigma2 = rng.inverse_gamma(0.5 * static_cast<double>(T), 0.5 * ssr);

        if (it >= cfg.nBurn) {
            const auto k = static_cast<Eigen::Index>(it - cfg.nBurn);
            out.beta.row(k) = beta.transpose();
            out.sigma2(k) = sigma2;
            for (Eigen::Index j = 0; j < p; ++j) {
                out.inclusion(k, j) = gamma[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
            }
        }
    }
    return out;
}

double ad_statistic(const Matrix& estimate, const Matrix& truth) {
    if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
        throw ArgumentError("estimate and truth differ in shape");
    }
    if (estimate.size() == 0) {
        throw ArgumentError("AD statistic of an empty estimate");
    }
    return (estimate - truth).cwiseAbs().mean();
}

void write_draws_csv(const PosteriorDraws& draws, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    const Eigen::Index n = draws.beta.rows();
    const Eigen::Index p = draws.beta.cols();
    out << std::setprecision(17) << "draw,sigma2";
    if (draws.lambda2.size() == n) {
        out << ",lambda2";
    }
    for (Eigen::Index j = 0; j < p; ++j) {
        out << ",beta" << j + 1;
    }
    if (draws.inclusion.rows() == n) {
        for (Eigen::Index j = 0; j < p; ++j) {
            out << ",gamma" << j + 1;
        }
    }
    out << '\n';
    for (Eigen::Index k = 0; k < n; ++k) {
        out << k + 1 << ',' << draws.sigma2(k);
        if (draws.lambda2.size() == n) {
            out << ',' << draws.lambda2(k);
        }
        for (Eigen::Index j = 0; j < p; ++j) {
            out << ',' << draws.beta(k, j);
        }
        if (draws.inclusion.rows() == n) {
            for (Eigen::Index j = 0; j < p; ++j) {
                out << ',' << static_cast<int>(draws.inclusion(k, j));
            }
        }
        out << '\n';
    }
}

}  // namespace tvpgamp
