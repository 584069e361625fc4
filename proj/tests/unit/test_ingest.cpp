#include <doctest.h>

#include "tvpgamp/ingest.hpp"
#include "../support/dense_reference.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace tvpgamp;

namespace {

std::vector<double> positive_walk(std::size_t n, unsigned seed) {
    std::mt19937_64 g(seed);
    std::normal_distribution<double> z(0.0, 0.01);
    std::vector<double> w(n);
    double level = 100.0;
    for (auto& v : w) {
        level *= std::exp(z(g));
        v = level;
    }
    return w;
}

}  // namespace

TEST_CASE("transform codes outside 1..6 are rejected") {
    CHECK_THROWS_AS(transform_code_from_int(0), DataError);
    CHECK_THROWS_AS(transform_code_from_int(7), DataError);
    CHECK(transform_code_from_int(5) == TransformCode::LogDiff);
    CHECK(differencing_order(TransformCode::Log) == 0);
    CHECK(differencing_order(TransformCode::LogDiff) == 1);
    CHECK(differencing_order(TransformCode::Diff2) == 2);
    CHECK(uses_log(TransformCode::LogDiff2));
    CHECK_FALSE(uses_log(TransformCode::Diff));
}

TEST_CASE("apply_transform worked values") {
    const std::vector<double> a{3, 5};
    const auto x1 = apply_transform(a, TransformCode::Level);
    CHECK(x1 == std::vector<double>{3, 5});

    const std::vector<double> b{100, 110};
    const auto x5 = apply_transform(b, TransformCode::LogDiff);
    CHECK(is_missing(x5[0]));
    CHECK(x5[1] == doctest::Approx(0.0953102).epsilon(1e-6));

    const std::vector<double> c{1, 4, 9};
    const auto x2 = apply_transform(c, TransformCode::Diff);
    CHECK(is_missing(x2[0]));
    CHECK(x2[1] == 3.0);
    CHECK(x2[2] == 5.0);

    const auto x3 = apply_transform(c, TransformCode::Diff2);
    CHECK(is_missing(x3[0]));
    CHECK(is_missing(x3[1]));
    CHECK(x3[2] == 2.0);

    const std::vector<double> e{1.0, std::exp(2.0)};
    const auto x4 = apply_transform(e, TransformCode::Log);
    CHECK(x4[0] == 0.0);
    CHECK(x4[1] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("log codes reject non-positive levels with series and index") {
    const std::vector<double> w{1.0, 2.0, 0.0, 3.0};
    try {
        apply_transform(w, TransformCode::LogDiff, "INDPRO");
        FAIL("expected DomainError");
    } catch (const DomainError& err) {
        const std::string msg = err.what();
        CHECK(msg.find("INDPRO") != std::string::npos);
        CHECK(msg.find('2') != std::string::npos);
    }
    CHECK_NOTHROW(apply_transform(w, TransformCode::Diff));
}

TEST_CASE("code 5 round trip recovers relative levels") {
    const auto w = positive_walk(300, 3);
    const auto x = apply_transform(w, TransformCode::LogDiff);
    double cum = 0.0;
    for (std::size_t t = 1; t < w.size(); ++t) {
        cum += x[t];
        CHECK(std::abs(std::exp(cum) - w[t] / w[0]) <= 1e-12 * (w[t] / w[0]));
    }
}

TEST_CASE("code 6 equals code 5 then a first difference") {
    const auto w = positive_walk(200, 11);
    const auto x5 = apply_transform(w, TransformCode::LogDiff);
    const auto x6 = apply_transform(w, TransformCode::LogDiff2);
    CHECK(is_missing(x6[0]));
    CHECK(is_missing(x6[1]));
    for (std::size_t t = 2; t < w.size(); ++t) {
        CHECK(std::abs(x6[t] - (x5[t] - x5[t - 1])) <= 1e-14);
    }
}

TEST_CASE("inflation target") {
    std::vector<double> p(13, 100.0);
    p[12] = 110.0;
    const auto pi12 = build_inflation_target(p, 12);
    for (int t = 0; t < 12; ++t) {
        CHECK(is_missing(pi12[t]));
    }
    CHECK(pi12[12] == doctest::Approx(9.53102).epsilon(1e-6));

    const std::vector<double> flat{50, 50, 50};
    CHECK(build_inflation_target(flat, 1)[2] == 0.0);

    const std::vector<double> q{100, 101};
    CHECK(build_inflation_target(q, 1)[1] == doctest::Approx(11.9404).epsilon(1e-5));

    CHECK_THROWS_AS(build_inflation_target(q, 0), ArgumentError);
    const std::vector<double> bad{100, -1, 100};
    CHECK_THROWS_AS(build_inflation_target(bad, 1), DomainError);
}

TEST_CASE("panel CSV with a transform row") {
    std::istringstream in(
        "date,A,B,P\n"
        "transform,1,2,5\n"
        "2000-01-01,,1,100\n"
        "2000-02-01,2,3,101\n"
        "2000-03-01,4,6,103\n");
    const auto panel = parse_panel_csv(in);
    CHECK(panel.length() == 3);
    CHECK(panel.mnemonics == std::vector<std::string>{"A", "B", "P"});
    CHECK(is_missing(panel.series.at("A")[0]));
    CHECK(panel.tcodes.at("P") == TransformCode::LogDiff);

    const auto st = to_stationary(panel);
    CHECK(st.leadingMissing.at("A") == 1);
    CHECK(st.leadingMissing.at("B") == 1);
    CHECK(st.leadingMissing.at("P") == 1);
    CHECK(st.series.at("B")[2] == 3.0);
    CHECK(st.common_start() == 1);
    const Matrix m = st.matrix({"B", "A"});
    CHECK(m.rows() == 3);
    CHECK(m(2, 0) == 3.0);
    CHECK(m(1, 1) == 2.0);
}

TEST_CASE("panel CSV errors") {
    SUBCASE("interior gap") {
        std::istringstream in("date,A\n2000-01-01,1\n2000-02-01,\n2000-03-01,3\n");
        CHECK_THROWS_AS(parse_panel_csv(in, {}, true), DataError);
    }
    SUBCASE("dates out of order") {
        std::istringstream in("date,A\n2000-02-01,1\n2000-01-01,2\n");
        CHECK_THROWS_AS(parse_panel_csv(in, {}, true), DataError);
    }
    SUBCASE("missing code without a default") {
        std::istringstream in("date,A\n2000-01-01,1\n2000-02-01,2\n");
        CHECK_THROWS_AS(parse_panel_csv(in), DataError);
    }
    SUBCASE("code from the sidecar map") {
        std::istringstream in("date,A\n2000-01-01,1\n2000-02-01,2\n");
        const auto p = parse_panel_csv(in, {{"A", 2}});
        CHECK(p.tcodes.at("A") == TransformCode::Diff);
    }
    SUBCASE("bad code") {
        std::istringstream in("date,A\ntransform,9\n2000-01-01,1\n");
        CHECK_THROWS_AS(parse_panel_csv(in), DataError);
    }
}

TEST_CASE("panel write/read round trip and sidecar JSON") {
    const auto dir = testsupport::scratch_dir("ingest");
    RawPanel p;
    p.dates = {"2001-01-01", "2001-02-01", "2001-03-01"};
    p.mnemonics = {"X", "CPI"};
    p.series["X"] = {kMissing, 0.5, -0.25};
    p.series["CPI"] = {100.0, 100.1, 100.3};
    p.tcodes["X"] = TransformCode::Level;
    p.tcodes["CPI"] = TransformCode::LogDiff2;
    write_panel_csv(p, dir / "panel.csv");
    const auto q = read_panel_csv(dir / "panel.csv");
    CHECK(q.dates == p.dates);
    CHECK(is_missing(q.series.at("X")[0]));
    CHECK(q.series.at("CPI")[2] == 100.3);
    CHECK(q.tcodes.at("CPI") == TransformCode::LogDiff2);

    {
        std::ofstream j(dir / "codes.json");
        j << R"({"tcodes": {"X": 2}})";
    }
    CHECK(read_tcodes_json(dir / "codes.json").at("X") == 2);
}

TEST_CASE("regression frame alignment") {
    const auto price = positive_walk(40, 5);
    const auto pi1 = build_inflation_target(price, 1);

    SUBCASE("gap form, h = 1") {
        FrameSpec fs;
        fs.horizon = 1;
        fs.form = TargetForm::Gap;
        fs.ownLags = 2;
        fs.predictorLags = {};
        const auto f = make_regression_frame(price, Matrix(40, 0), fs);
        CHECK(f.nUnshrunk == 3);
        for (std::size_t r = 0; r < f.nTrain; ++r) {
            const auto t = f.rowIndex[r];
            CHECK(f.y(static_cast<Eigen::Index>(r)) == doctest::Approx(pi1[t + 1] - pi1[t]).epsilon(1e-14));
            CHECK(f.X(static_cast<Eigen::Index>(r), 1) == doctest::Approx(pi1[t] - pi1[t - 1]));
        }
        CHECK(f.rowIndex.back() == 39);
        CHECK(f.nTrain == f.rowIndex.size() - 1);
        CHECK(is_missing(f.y(f.y.size() - 1)));
    }
    SUBCASE("level form, h = 1") {
        FrameSpec fs;
        fs.horizon = 1;
        fs.form = TargetForm::Level;
        fs.ownLags = 2;
        fs.predictorLags = {};
        const auto f = make_regression_frame(price, Matrix(40, 0), fs);
        for (std::size_t r = 0; r < f.nTrain; ++r) {
            const auto t = f.rowIndex[r];
            CHECK(f.y(static_cast<Eigen::Index>(r)) == pi1[t + 1]);
            CHECK(f.X(static_cast<Eigen::Index>(r), 1) == pi1[t]);
            CHECK(f.X(static_cast<Eigen::Index>(r), 2) == pi1[t - 1]);
        }
    }
    SUBCASE("no lags, no predictors: lone intercept") {
        FrameSpec fs;
        fs.ownLags = 0;
        fs.predictorLags = {};
        const auto f = make_regression_frame(price, Matrix(40, 0), fs);
        CHECK(f.X.cols() == 1);
        CHECK((f.X.array() == 1.0).all());
    }
    SUBCASE("target date minus regressor date is h") {
        Matrix fac(40, 2);
        std::mt19937_64 g(1);
        std::normal_distribution<double> z;
        for (Eigen::Index i = 0; i < fac.size(); ++i) {
            fac.data()[i] = z(g);
        }
        fac.row(0).setConstant(kMissing);
        for (int h : {1, 3, 6, 12}) {
            FrameSpec fs;
            fs.horizon = h;
            fs.predictorLags = {0, 1};
            const auto f = make_regression_frame(price, fac, fs);
            const auto pih = build_inflation_target(price, h);
            CHECK(f.X.cols() == 3 + 4);
            for (std::size_t r = 0; r < f.nTrain; ++r) {
                const auto t = f.rowIndex[r];
                CHECK(f.y(static_cast<Eigen::Index>(r)) == doctest::Approx(pih[t + h] - pi1[t]).epsilon(1e-14));
                CHECK(f.X(static_cast<Eigen::Index>(r), 3) == fac(static_cast<Eigen::Index>(t), 0));
                CHECK(f.X(static_cast<Eigen::Index>(r), 5) == fac(static_cast<Eigen::Index>(t - 1), 0));
            }
            CHECK(f.nTrain + static_cast<std::size_t>(h) == f.rowIndex.size());
        }
    }
    SUBCASE("interior missing predictor is a data error") {
        Matrix fac = Matrix::Ones(40, 1);
        fac(20, 0) = kMissing;
        FrameSpec fs;
        CHECK_THROWS_AS(make_regression_frame(price, fac, fs), DataError);
    }
    SUBCASE("too short for any target") {
        const std::vector<double> tiny{100, 101, 102};
        FrameSpec fs;
        fs.horizon = 12;
        CHECK_THROWS_AS(make_regression_frame(tiny, Matrix(3, 0), fs), DataError);
    }
}
