#include "assetsim/econometrics.hpp"
#include "assetsim/errors.hpp"
#include "assetsim/ols.hpp"
#include "assetsim/reference.hpp"
#include "assetsim/rng.hpp"
#include "assetsim/synthetic.hpp"

#include <doctest.h>

#include <cmath>

using namespace assetsim;

TEST_CASE("OLS exact fit") {
    Eigen::MatrixXd X(5, 2);
    Eigen::VectorXd y(5);
    for (int i = 0; i < 5; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = i;
        y(i) = 2.0 * i + 1.0;
    }
    const auto f = ols(Design({"const", "x"}, X), y);
    CHECK(f.coef("const") == doctest::Approx(1.0));
    CHECK(f.coef("x") == doctest::Approx(2.0));
    CHECK(f.r_squared == doctest::Approx(1.0));
    CHECK(f.residuals.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("OLS slope is consistent") {
    Rng rng(4, 0);
    const int n = 10000;
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = rng.normal();
        y(i) = X(i, 1) + rng.normal();
    }
    const auto f = ols(Design({"const", "x"}, X), y);
    CHECK(std::abs(f.coef("x") - 1.0) < 3.0 * f.stderr_of("x"));
    const auto [lo, hi] = f.confidence_interval("x", 0.99);
    CHECK(lo < f.coef("x"));
    CHECK(hi > f.coef("x"));
    CHECK(f.dof == n - 2);
}

TEST_CASE("OLS rank deficiency names the columns") {
    Eigen::MatrixXd X(6, 3);
    Eigen::VectorXd y(6);
    for (int i = 0; i < 6; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = i;
        X(i, 2) = 2.0 * i;
        y(i) = i * i;
    }
    try {
        ols(Design({"const", "a", "b"}, X), y);
        FAIL("expected rank error");
    } catch (const RankError& e) {
        CHECK_FALSE(e.columns().empty());
    }
    CHECK_THROWS_AS(ols(Design({"const", "a", "b"}, X.topRows(3)), y.head(3)), ValidationError);
}

TEST_CASE("AR(1) on an exact recursion") {
    std::vector<double> v{0.0};
    for (int i = 0; i < 12; ++i) v.push_back(0.5 * v.back() + 1.0);
    const auto f = fit_ar1(AnnualSeries("y", 1990, v), false, "Z");
    CHECK(f.coefs.intercept == doctest::Approx(1.0));
    CHECK(f.coefs.slope == doctest::Approx(0.5));
    CHECK(f.residuals.size() == v.size() - 1);
    for (double r : f.residuals.values()) CHECK(std::abs(r) < 1e-10);

    const AnnualSeries bad("V", 1990, {1.0, 2.0, -1.0, 3.0});
    CHECK_THROWS_AS(fit_ar1(bad, true, "Z_V"), ValidationError);
}

TEST_CASE("bond equation recovery") {
    Rng rng(5, 0);
    std::vector<double> R{5.0}, B;
    for (int i = 0; i < 40; ++i) {
        R.push_back(R.back() * std::exp(0.2 * rng.normal()));
        const double dR = R.back() - R[R.size() - 2];
        B.push_back(0.01 * R[R.size() - 2] - 0.02 - 0.05 * dR);
    }
    const auto f = fit_bond(AnnualSeries("B", 1971, B), AnnualSeries("R", 1970, R));
    CHECK(f.coefs.a == doctest::Approx(0.02));
    CHECK(f.coefs.d == doctest::Approx(0.05));

    const std::vector<double> flat(41, 4.0);
    CHECK_THROWS_AS(fit_bond(AnnualSeries("B", 1971, B), AnnualSeries("R", 1970, flat)), RankError);
}

TEST_CASE("valuation identities") {
    const auto p = valuation_from_regression(0.023893, 0.008608, 0.190133);
    CHECK(p.c == doctest::Approx(0.04527).epsilon(1e-4 / 0.04527));
    CHECK(p.h == doctest::Approx(-0.1124).epsilon(1e-3 / 0.1124));
    CHECK(p.b == 1.0 - 0.190133);
    CHECK_THROWS_WITH_AS(valuation_from_regression(0.02, 0.01, 1e-12), doctest::Contains("cannot identify c"),
                         ValidationError);
}

TEST_CASE("valuation regression recovers a simulated trend-plus-AR(1)") {
    const double b = 0.8, c = 0.05, h = -0.1;
    const int n = 3000;
    Rng rng(21, 0);
    std::vector<double> Q, Gbar;
    double H = 0.0;
    for (int t = 1; t <= n; ++t) {
        const double next = h + b * (H - h) + 0.1 * rng.normal();
        const double g = 0.01 * rng.normal();
        Q.push_back(next - H + c + g);
        Gbar.push_back(g);
        H = next;
    }
    const auto f = fit_valuation(AnnualSeries("Q", 1001, Q), AnnualSeries("Gbar", 1001, Gbar), 10);
    const double gamma = f.params.gamma;
    CHECK(std::abs(gamma - (1.0 - b)) < 3.0 * f.fit.stderr_of("neg_gamma"));
    CHECK(f.params.c == doctest::Approx(c).epsilon(0.1));
    CHECK(f.params.h == doctest::Approx(h).epsilon(0.5));
    CHECK(f.params.H_series.size() == std::size_t(n) + 1);
    CHECK(f.params.H_series.at(1000) == 0.0);
}

TEST_CASE("scaled regression recovers a volatility-scaled model") {
    Rng rng(8, 0);
    const int n = 2000;
    std::vector<double> V, y;
    for (int i = 0; i < n; ++i) {
        V.push_back(std::exp(2.3 + 0.4 * rng.normal()));
        y.push_back(0.1 + 0.02 * V.back() + V.back() * 0.01 * rng.normal());
    }
    const auto f = fit_scaled(AnnualSeries("y", 1, y), {}, AnnualSeries("V", 1, V), "Z");
    CHECK(std::abs(f.coef("intercept") - 0.1) < 3.0 * f.fit.stderr_of("intercept"));
    CHECK(std::abs(f.coef("volatility") - 0.02) < 3.0 * f.fit.stderr_of("volatility"));
    double ss = 0.0;
    for (double z : f.residuals.values()) ss += z * z;
    CHECK(std::sqrt(ss / double(n)) == doctest::Approx(0.01).epsilon(0.05));
}

TEST_CASE("scaled regression with constant V equals plain OLS") {
    Rng rng(9, 0);
    std::vector<double> x, y;
    for (int i = 0; i < 30; ++i) {
        x.push_back(rng.normal());
        y.push_back(0.5 - 0.3 * x.back() + 0.1 * rng.normal());
    }
    const std::vector<double> V(30, 4.0);
    const auto s = fit_scaled(AnnualSeries("y", 1, y), {{"x", AnnualSeries("x", 1, x)}}, AnnualSeries("V", 1, V),
                              "Z", false);
    Eigen::MatrixXd X(30, 2);
    Eigen::VectorXd Y(30);
    for (int i = 0; i < 30; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = x[std::size_t(i)];
        Y(i) = y[std::size_t(i)];
    }
    const auto o = ols(Design({"c", "x"}, X), Y);
    CHECK(s.coef("intercept") == doctest::Approx(o.coef("c")).epsilon(1e-10));
    CHECK(s.coef("x") == doctest::Approx(o.coef("x")).epsilon(1e-10));
    CHECK(s.fit.stderr_of("x") == doctest::Approx(o.stderr_of("x")).epsilon(1e-10));
}

TEST_CASE("stationarity gate") {
    ModelSpec m = reference_model();
    CHECK(m.gate().passed());
    m.vol.slope = 1.2;
    const auto g = m.gate();
    CHECK_FALSE(g.passed());
    CHECK_FALSE(g.vol);
    REQUIRE(g.failures().size() == 1);
    m = reference_model();
    m.domestic.valuation = 0.1;
    CHECK_FALSE(m.gate().valuation);
}

TEST_CASE("full fit on a simulated history") {
    const ModelSpec truth = reference_model();
    const auto hist = simulate_history(truth, reference_innovations(), {});
    DeriveOptions options;
    options.volatility_annualization_days = 252;
    const DerivedSeries d = derive_series(hist.bundle, options);

    CHECK(d.Q.at(1950) == doctest::Approx(hist.Q.at(1950)).epsilon(1e-9));
    CHECK(d.B.at(1990) == doctest::Approx(hist.B.at(1990)).epsilon(1e-9));
    CHECK(d.V.at(1990) == doctest::Approx(hist.V.at(1990)).epsilon(1e-6));

    const ModelFits fits = fit_all(d);
    const ModelSpec m = assemble_model(fits, d);
    CHECK(m.gate().passed());
    CHECK(m.residuals.present_count(kZV) == 96);
    CHECK(m.residuals.present_count(kZS) == 97);
    CHECK(m.filled.complete());
    REQUIRE(m.residuals.correlation.rows() == 8);
    CHECK(m.residuals.correlation_names[4] == "U");
    CHECK((m.residuals.correlation - m.residuals.correlation.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(m.residuals.correlation.diagonal().minCoeff() == doctest::Approx(1.0));
    CHECK(m.defaults.year == 2024);
    CHECK(m.defaults.earnings.size() == 10);
    CHECK(residual_reports(fits).size() == 8);
    CHECK_FALSE(coefficient_table(fits).empty());
    CHECK(lag_selection(d.Q, d.E).size() == 10);

    const SimpleModelSpec s = fit_simple_model(d);
    CHECK(s.sigma3.rows() == 3);
    CHECK(s.sigma5.rows() == 5);
}
