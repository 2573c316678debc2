#include "assetsim/engine.hpp"
#include "assetsim/errors.hpp"
#include "assetsim/reference.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace assetsim;

namespace {

// Stationary model with no randomness: zero residual rows and zero bandwidths.
ModelSpec quiet_model() {
    ModelSpec m;
    m.name = "quiet";
    m.vol = {0.5, 0.5};
    m.rate = {0.5, 0.5};
    m.spread = {0.5, 0.5};
    m.domestic.valuation = -0.2;
    m.valuation.window = 10;
    m.filled.start_year = 2000;
    m.filled.values = InnovationRows::Zero(10, Eigen::Index(kNoiseDim));
    m.residuals = m.filled;
    m.bandwidths.n = 10;
    m.defaults.V = 10.0;
    m.defaults.R = 5.0;
    m.defaults.S = 1.0;
    m.defaults.H = 0.0;
    m.defaults.earnings.assign(10, 1.0);
    m.defaults.year = 2024;
    return m;
}

SimConfig withdrawal_config(double stock, int horizon) {
    SimConfig c;
    c.horizon = horizon;
    c.stock_share_start = c.stock_share_end = stock;
    c.domestic_share = 0.5;
    c.cashflow = {0.04, CashflowDirection::Withdraw, 0.04, 1};
    c.n_paths = 2000;
    c.master_seed = 11;
    return c;
}

}  // namespace

TEST_CASE("step advances V on the log scale") {
    const ModelSpec m = reference_model();
    FactorState s = reference_state();
    s.V = 10.0;
    const NoiseDraw zero{};
    const auto out = step(m, s, zero);
    CHECK(out.state.V == doctest::Approx(std::exp(0.847850 + 0.620146 * std::log(10.0))));
    CHECK(out.state.V == doctest::Approx(9.736).epsilon(1e-4));
    CHECK(out.state.year == s.year + 1);
    CHECK(out.state.earnings.size() == 10);
}

TEST_CASE("H is unchanged at the detrended fixed point") {
    ModelSpec m = quiet_model();
    m.domestic.valuation = 0.0;
    m.valuation.c = 0.0;
    FactorState s = m.defaults;
    s.H = 0.37;
    const auto out = step(m, s, NoiseDraw{});
    CHECK(out.Q == 0.0);
    CHECK(out.G_bar == doctest::Approx(0.0));
    CHECK(out.state.H == doctest::Approx(0.37));
}

TEST_CASE("deterministic step from the reference state") {
    const ModelSpec m = reference_model();
    const FactorState s = reference_state();
    const auto out = step(m, s, NoiseDraw{});

    // Hand evaluation of the factor and return recursions.
    const double V = std::exp(0.847850 + 0.620146 * std::log(12.5));
    const double R = std::exp(0.643694 + 0.539518 * std::log(5.9));
    const double S = 0.6437 + 0.5395 * 0.12;
    const double dR = R - 5.9;
    const double G = 0.07756 + 0.04786 * 0.12 - 0.007841 * V + 0.03721 * dR;
    const std::vector<double> E = {86.53, 94.55, 109.88, 132.39, 139.47, 94.13, 197.87, 172.75, 192.43, 208.0};
    const double old_mean = std::accumulate(E.begin(), E.end(), 0.0) / 10.0;
    const double new_mean = (old_mean * 10.0 - 86.53 + 208.0 * std::exp(G)) / 10.0;
    const double Gbar = std::log(new_mean / old_mean);
    const double Q = 0.26851 - 0.03412 * 0.12 - 0.013568 * V - 0.078238 * dR - 0.1644 * 0.09;
    const double I = 0.2689 - 0.0188 * V - 0.0514 * dR - 0.0941 * 0.09;
    const double B = 0.01 * 5.9 - 0.016611 - 0.055884 * dR;
    const double c = 0.008608 / 0.190133;

    CHECK(out.state.V == doctest::Approx(V).epsilon(1e-12));
    CHECK(out.state.R == doctest::Approx(R).epsilon(1e-12));
    CHECK(out.state.S == doctest::Approx(S).epsilon(1e-12));
    CHECK(out.G == doctest::Approx(G).epsilon(1e-12));
    CHECK(out.G_bar == doctest::Approx(Gbar).epsilon(1e-12));
    CHECK(out.Q == doctest::Approx(Q).epsilon(1e-12));
    CHECK(out.I == doctest::Approx(I).epsilon(1e-12));
    CHECK(out.B == doctest::Approx(B).epsilon(1e-12));
    CHECK(out.state.H == doctest::Approx(0.09 + Q - Gbar - c).epsilon(1e-12));
    CHECK(out.state.earnings.back() == doctest::Approx(208.0 * std::exp(G)).epsilon(1e-12));
}

TEST_CASE("earnings window is rescaled without changing growth") {
    ModelSpec m = quiet_model();
    m.growth.intercept = 100.0;
    FactorState s = m.defaults;
    s.earnings.assign(10, 1e120);
    const auto out = step(m, s, NoiseDraw{});
    CHECK(out.state.earnings.back() == doctest::Approx(1.0));
    CHECK(std::isfinite(out.G_bar));
}

TEST_CASE("glidepath") {
    SimConfig c;
    c.horizon = 30;
    c.domestic_share = 0.7;
    c.stock_share_start = c.stock_share_end = 0.6;
    for (int t = 0; t <= 30; ++t) {
        const auto w = glidepath(c, t);
        CHECK(w.domestic == doctest::Approx(0.42));
        CHECK(w.intl == doctest::Approx(0.18));
        CHECK(w.bond == doctest::Approx(0.4));
    }
    c.stock_share_start = 0.8;
    CHECK(glidepath(c, 0).bond == doctest::Approx(0.2));
    CHECK(glidepath(c, 30).bond == doctest::Approx(0.4));
    c.stock_share_start = 0.6;
    c.stock_share_end = 0.4;
    const auto mid = glidepath(c, 15);
    CHECK(mid.domestic + mid.intl == doctest::Approx(0.5));
    for (int t = 0; t <= 30; ++t) {
        const auto w = glidepath(c, t);
        CHECK(w.domestic + w.intl + w.bond == doctest::Approx(1.0));
        CHECK(w.bond >= 0.0);
        CHECK(w.bond <= 1.0);
    }
}

TEST_CASE("effective cashflow") {
    CHECK(effective_cashflow(1.0, 0.3, 1) == 1.0);
    CHECK(effective_cashflow(1.0, 0.21, 2) == doctest::Approx(1.05).epsilon(1e-14));
    CHECK(effective_cashflow(2.0, 0.0, 12) == 2.0);
    CHECK_THROWS_AS(effective_cashflow(1.0, -1.0, 4), ValidationError);
    CHECK_THROWS_AS(effective_cashflow(1.0, 0.1, 0), ValidationError);

    // continuity at zero
    CHECK(effective_cashflow(1.0, 1e-9, 12) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(effective_cashflow(1.0, -1e-9, 12) == doctest::Approx(1.0).epsilon(1e-8));

    double prev = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double r = -0.5 + 0.015 * k;
        const double v = effective_cashflow(1.0, r, 12);
        if (k > 0) CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("single-asset path compounds exactly") {
    ModelSpec m = quiet_model();
    m.domestic.valuation = 0.0;
    m.domestic.intercept = 0.05;
    const Simulator sim(m, true);
    SimConfig c;
    c.horizon = 20;
    c.stock_share_start = c.stock_share_end = 1.0;
    c.domestic_share = 1.0;
    c.master_seed = 3;
    const auto p = sim.simulate_path(c, 0);
    REQUIRE(p.wealth.size() == 21);
    CHECK(p.wealth.back() == doctest::Approx(std::exp(0.05 * 20)).epsilon(1e-12));
    CHECK_FALSE(p.ruin_year.has_value());
    CHECK(p.returns.size() == 20);
}

TEST_CASE("immediate ruin") {
    const ModelSpec m = quiet_model();
    const Simulator sim(m);
    SimConfig c;
    c.horizon = 10;
    c.cashflow = {5.0, CashflowDirection::Withdraw, 0.0, 1};
    const auto p = sim.simulate_path(c, 0);
    REQUIRE(p.ruin_year.has_value());
    CHECK(*p.ruin_year == 1);
    for (std::size_t t = 1; t < p.wealth.size(); ++t) CHECK(p.wealth[t] == 0.0);
}

TEST_CASE("paths are reproducible") {
    const ModelSpec m = reference_model();
    const Simulator sim(m);
    const SimConfig c = withdrawal_config(0.6, 30);
    const auto a = sim.simulate_path(c, 17);
    const auto b = sim.simulate_path(c, 17);
    CHECK(a.wealth == b.wealth);
    CHECK(a.returns == b.returns);
    CHECK(sim.simulate_path(c, 18).wealth != a.wealth);
}

TEST_CASE("degenerate ensemble has identical percentile paths") {
    const ModelSpec m = quiet_model();
    const Simulator sim(m);
    SimConfig c = withdrawal_config(0.6, 20);
    c.n_paths = 200;
    const auto r = sim.run_ensemble(c, 2);
    REQUIRE(r.percentile_paths.size() == 5);
    const auto& first = r.percentile_paths.begin()->second.wealth;
    for (const auto& [q, p] : r.percentile_paths) CHECK(p.wealth == first);
    CHECK((r.ruin_probability == 0.0 || r.ruin_probability == 1.0));
}

TEST_CASE("ensemble statistics and ordering") {
    const ModelSpec m = reference_model();
    const Simulator sim(m);
    const SimConfig c = withdrawal_config(0.6, 30);
    const auto r = sim.run_ensemble(c, 1);
    CHECK(r.n_paths == 2000);
    CHECK(r.ruin_probability >= 0.0);
    CHECK(r.ruin_probability <= 1.0);
    double prev = -1.0;
    for (int q : kPercentiles) {
        const auto& p = r.percentile_paths.at(q);
        CHECK(p.wealth.back() >= prev);
        prev = p.wealth.back();
    }
    CHECK(r.p90_final_wealth == r.percentile_paths.at(90).wealth.back());
    if (r.ruin_probability > 0.0) {
        REQUIRE(r.mean_ruin_year.has_value());
        CHECK(*r.mean_ruin_year >= 1.0);
        CHECK(*r.mean_ruin_year <= 30.0);
    }

    const auto r4 = sim.run_ensemble(c, 4);
    CHECK(r4.ruin_probability == r.ruin_probability);
    CHECK(r4.mean_final_wealth == r.mean_final_wealth);
    for (int q : kPercentiles) CHECK(r4.percentile_paths.at(q).wealth == r.percentile_paths.at(q).wealth);
}

TEST_CASE("common random numbers give monotone ruin") {
    const ModelSpec m = reference_model();
    const Simulator sim(m);
    SimConfig c = withdrawal_config(0.6, 30);
    double prev = -1.0;
    for (double w : {0.02, 0.04, 0.06, 0.08}) {
        c.cashflow.amount = w;
        const double p = sim.run_ensemble(c, 2).ruin_probability;
        CHECK(p >= prev);
        prev = p;
    }
    c.cashflow.amount = 0.05;
    prev = 2.0;
    for (double w0 : {0.8, 1.0, 1.5, 3.0}) {
        c.initial_wealth = w0;
        const double p = sim.run_ensemble(c, 2).ruin_probability;
        CHECK(p <= prev);
        prev = p;
    }
}

TEST_CASE("factor positivity over a long path") {
    const auto f = simulate_factors(reference_model(), 20000, 5);
    CHECK(f.rows() == 20000);
    CHECK(f.allFinite());
    // ln V and ln R finite means V and R stayed positive.
    CHECK(f.col(0).array().exp().minCoeff() > 0.0);
    CHECK(f.col(1).array().exp().minCoeff() > 0.0);
}

TEST_CASE("configuration validation") {
    SimConfig c;
    c.horizon = 51;
    c.stock_share_start = 1.5;
    try {
        validate(c);
        FAIL("expected field errors");
    } catch (const FieldError& e) {
        REQUIRE(e.fields().size() == 2);
        CHECK(e.fields()[0].name == "horizon");
        CHECK(e.fields()[1].name == "stock_share_start");
    }
    c = SimConfig{};
    c.n_paths = 99;
    CHECK_THROWS_AS(validate(c), FieldError);
    c = SimConfig{};
    c.cashflow.frequency = 2;
    CHECK_THROWS_AS(validate(c), FieldError);
    CHECK_NOTHROW(validate(SimConfig{}));
}

TEST_CASE("overrides replace the initial factors but not the earnings") {
    const ModelSpec m = reference_model();
    SimConfig c;
    c.factor_overrides.V = 20.0;
    c.factor_overrides.H = -0.5;
    const auto s = initial_state(m, c);
    CHECK(s.V == 20.0);
    CHECK(s.H == -0.5);
    CHECK(s.R == m.defaults.R);
    CHECK(s.earnings == m.defaults.earnings);
}

TEST_CASE("non-stationary models need force") {
    ModelSpec m = reference_model();
    m.vol.slope = 1.2;
    CHECK_THROWS_AS(Simulator{m}, NonStationaryError);
    CHECK_NOTHROW(Simulator(m, true).model());
}
