#include <doctest.h>

#include "tvpgamp/error.hpp"
#include "tvpgamp/oracles.hpp"
#include "../support/dense_reference.hpp"

#include <cmath>
#include <fstream>
#include <random>

using namespace tvpgamp;

namespace {

Matrix gaussian(Eigen::Index n, Eigen::Index p, unsigned seed) {
    std::mt19937_64 g(seed);
    std::normal_distribution<double> z;
    Matrix M(n, p);
    for (Eigen::Index i = 0; i < M.size(); ++i) {
        M.data()[i] = z(g);
    }
    return M;
}

struct Toy {
    Matrix X;
    Vector y;
};

// T = 200, p = 5, one active coefficient equal to 4.
Toy strong_signal() {
    Toy toy;
    toy.X = gaussian(200, 5, 31);
    toy.y = 4.0 * toy.X.col(0) + gaussian(200, 1, 32).col(0);
    return toy;
}

GibbsConfig short_chain(std::uint64_t seed) {
    GibbsConfig cfg;
    cfg.nSave = 2000;
    cfg.nBurn = 1000;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("ols") {
    Matrix x(4, 1);
    x << 1, 2, 3, 4;
    CHECK(ols(x, 2.0 * x.col(0))(0) == doctest::Approx(2.0).epsilon(1e-14));
    Vector orth(4);
    orth << 1, -1, 1, -1;
    Matrix x2(4, 1);
    x2 << 1, 1, 1, 1;
    CHECK(std::abs(ols(x2, orth)(0)) < 1e-15);

    const Matrix X = gaussian(60, 6, 3);
    const Vector y = gaussian(60, 1, 4).col(0);
    const Vector b = ols(X, y);
    CHECK((X.transpose() * (y - X * b)).cwiseAbs().maxCoeff() < 1e-8);

    Matrix sing = X;
    sing.col(5) = sing.col(0);
    CHECK_THROWS_AS(ols(sing, y), RankError);
    CHECK_THROWS_AS(ols(gaussian(3, 6, 1), gaussian(3, 1, 2).col(0)), RankError);
    CHECK_THROWS_AS(ols(X, Vector::Zero(3)), ArgumentError);
}

TEST_CASE("per-predictor ols") {
    Matrix X(3, 2);
    X << 1, 0, 0, 1, 1, 1;
    Vector y(3);
    y << 2, 3, 5;
    const Vector b = ols_per_predictor(X, y);
    CHECK(b(0) == doctest::Approx(3.5));
    CHECK(b(1) == doctest::Approx(4.0));
    X.col(1).setZero();
    CHECK_THROWS_AS(ols_per_predictor(X, y), RankError);
}

TEST_CASE("exact Gaussian posterior") {
    const Matrix X = gaussian(40, 5, 5);
    const Vector y = gaussian(40, 1, 6).col(0);

    const auto flat = exact_gaussian_posterior(X, y, Vector::Zero(5), 1.0);
    CHECK((flat.mean - ols(X, y)).cwiseAbs().maxCoeff() < 1e-10);

    const Eigen::HouseholderQR<Matrix> qr(gaussian(40, 5, 7));
    const Matrix Q = qr.householderQ() * Matrix::Identity(40, 5);
    const auto half = exact_gaussian_posterior(Q, y, Vector::Ones(5), 1.0);
    CHECK((half.mean - Q.transpose() * y / 2.0).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((half.variance.array() - 0.5).abs().maxCoeff() < 1e-12);

    const auto tight = exact_gaussian_posterior(X, y, Vector::Constant(5, 1e12), 1.0);
    CHECK(tight.mean.cwiseAbs().maxCoeff() < 1e-9);

    // uniform alpha shifts every Gram eigenvalue by alpha
    const double alpha = 2.5;
    const double s2 = 0.7;
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(X.transpose() * X / s2);
    const Vector lam = eig.eigenvalues().array() + alpha;
    const Matrix V = eig.eigenvectors();
    const Vector ridge = V * (V.transpose() * X.transpose() * y / s2).cwiseQuotient(lam);
    const Vector ridgeVar = (V.array().square().matrix() * lam.cwiseInverse());
    const auto post = exact_gaussian_posterior(X, y, Vector::Constant(5, alpha), s2);
    CHECK((post.mean - ridge).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((post.variance - ridgeVar).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(exact_gaussian_posterior(Matrix::Zero(2, 2001), Vector::Zero(2), Vector::Ones(2001), 1.0),
                    ArgumentError);
    CHECK_THROWS_AS(exact_gaussian_posterior(X, y, Vector::Ones(4), 1.0), ArgumentError);
    CHECK_THROWS_AS(exact_gaussian_posterior(X, y, Vector::Ones(5), 0.0), ArgumentError);
}

TEST_CASE("Gibbs configuration checks") {
    GibbsConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.nSave = 0;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    cfg.nSave = 10;
    cfg.ssvs.tau0 = 5.0;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    CHECK_THROWS_AS(gibbs_lasso(gaussian(2, 1, 1), Vector::Zero(2), GibbsConfig{}), ArgumentError);
    CHECK_THROWS_AS(gibbs_ssvs(gaussian(2, 1, 1), Vector::Zero(2), GibbsConfig{}), ArgumentError);
}

TEST_CASE("Bayesian LASSO on a strong-signal toy") {
    const auto toy = strong_signal();
    const auto draws = gibbs_lasso(toy.X, toy.y, short_chain(1));
    CHECK(draws.beta.rows() == 2000);
    CHECK(draws.beta.cols() == 5);
    CHECK(draws.lambda2.size() == 2000);
    CHECK((draws.sigma2.array() > 0.0).all());
    CHECK((draws.lambda2.array() > 0.0).all());
    const Vector m = draws.posterior_mean();
    CHECK(std::abs(m(0) - 4.0) < 0.3);
    for (Eigen::Index j = 1; j < 5; ++j) {
        CHECK(std::abs(m(j)) < 0.2);
    }
    const auto again = gibbs_lasso(toy.X, toy.y, short_chain(1));
    CHECK(again.beta == draws.beta);
}

TEST_CASE("SSVS on a strong-signal toy") {
    const auto toy = strong_signal();
    const auto draws = gibbs_ssvs(toy.X, toy.y, short_chain(2));
    CHECK(draws.inclusion.rows() == 2000);
    const Vector m = draws.posterior_mean();
    const Vector inc = draws.inclusion_rate();
    CHECK(std::abs(m(0) - 4.0) < 0.3);
    CHECK(inc(0) == 1.0);
    for (Eigen::Index j = 1; j < 5; ++j) {
        CHECK(std::abs(m(j)) < 0.2);
        CHECK(inc(j) < 0.5);
    }
    CHECK(((draws.inclusion.array() == 0.0) || (draws.inclusion.array() == 1.0)).all());

    auto all = short_chain(3);
    all.nSave = 200;
    all.nBurn = 50;
    all.ssvs.pi0 = 1.0;
    CHECK((gibbs_ssvs(toy.X, toy.y, all).inclusion.array() == 1.0).all());
}

TEST_CASE("chain length changes the posterior mean by less than its Monte Carlo error") {
    const auto toy = strong_signal();
    auto a = short_chain(4);
    auto b = short_chain(5);
    b.nSave = 4000;
    const auto da = gibbs_lasso(toy.X, toy.y, a);
    const auto db = gibbs_lasso(toy.X, toy.y, b);
    const Vector sd = ((da.beta.rowwise() - da.beta.colwise().mean()).array().square().colwise().sum() /
                       static_cast<double>(a.nSave - 1))
                          .sqrt()
                          .transpose();
    const Vector diff = (da.posterior_mean() - db.posterior_mean()).cwiseAbs();
    for (Eigen::Index j = 0; j < 5; ++j) {
        CHECK(diff(j) < 10.0 * sd(j) / std::sqrt(static_cast<double>(a.nSave)));
    }
}

TEST_CASE("SSVS inclusion probability") {
    SsvsSettings s;
    CHECK(ssvs_inclusion_probability(4.0, s) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ssvs_inclusion_probability(-4.0, s) == doctest::Approx(1.0).epsilon(1e-12));
    // pi N(0|0,tau1^2) / ((1-pi) N(0|0,tau0^2) + pi N(0|0,tau1^2)) = 0.25 / 1000.25
    CHECK(ssvs_inclusion_probability(0.0, s) == doctest::Approx(0.25 / 1000.25).epsilon(1e-12));
    s.tau0 = 3.9999;
    CHECK(ssvs_inclusion_probability(0.7, s) == doctest::Approx(0.5).epsilon(1e-4));
    s.pi0 = 1.0;
    CHECK(ssvs_inclusion_probability(0.0, s) == 1.0);
    s.pi0 = 0.0;
    CHECK(ssvs_inclusion_probability(10.0, s) == 0.0);
}

TEST_CASE("AD statistic") {
    Matrix t(2, 1);
    t << 1, 2;
    CHECK(ad_statistic(t, t) == 0.0);
    CHECK(ad_statistic(t.array() + 1.0, t) == 1.0);
    Matrix e(2, 1);
    e << 0, 5;
    CHECK(ad_statistic(e, t) == 2.0);
    CHECK_THROWS_AS(ad_statistic(Matrix(3, 1), t), ArgumentError);
    CHECK_THROWS_AS(ad_statistic(Matrix(0, 0), Matrix(0, 0)), ArgumentError);
}

TEST_CASE("draws CSV") {
    const auto dir = testsupport::scratch_dir("oracles");
    const auto toy = strong_signal();
    auto cfg = short_chain(6);
    cfg.nSave = 5;
    cfg.nBurn = 5;
    write_draws_csv(gibbs_ssvs(toy.X, toy.y, cfg), dir / "draws.csv");
    std::ifstream in(dir / "draws.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("draw,sigma2,beta1", 0) == 0);
    CHECK(header.find("gamma5") != std::string::npos);
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++rows;
    }
    CHECK(rows == 5);
}
