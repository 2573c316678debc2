#include "assetsim/econometrics.hpp"

#include "assetsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace assetsim {

namespace {

constexpr int kMinAr1Length = 10;
constexpr int kMinBondOverlap = 10;
constexpr int kMinValuationYears = 20;

AnnualSeries residual_series(std::string name, int first_year, const Eigen::VectorXd& r) {
    return AnnualSeries(std::move(name), first_year, std::vector<double>(r.data(), r.data() + r.size()),
                        Units::Dimensionless);
}

}  // namespace

std::vector<std::string> GateReport::failures() const {
    std::vector<std::string> out;
    if (!vol) out.emplace_back("|b_V| < 1");
    if (!rate) out.emplace_back("|b_R| < 1");
    if (!spread) out.emplace_back("|b_S| < 1");
    if (!valuation) out.emplace_back("k_Q in (0, 2)");
    return out;
}

GateReport stationarity_gate(const ModelSpec& m) {
    GateReport g;
    g.vol = std::abs(m.vol.slope) < 1.0;
    g.rate = std::abs(m.rate.slope) < 1.0;
    g.spread = std::abs(m.spread.slope) < 1.0;
    const double k_q = -m.domestic.valuation;
    g.valuation = k_q > 0.0 && k_q < 2.0;
    return g;
}

GateReport ModelSpec::gate() const { return stationarity_gate(*this); }

Ar1Fit fit_ar1(const AnnualSeries& x, bool log_scale, std::string residual_name) {
    if (x.size() < std::size_t(kMinAr1Length)) {
        throw ValidationError("AR(1) fit of " + x.name() + " needs at least " + std::to_string(kMinAr1Length) +
                              " values");
    }
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = x.values()[i];
        if (log_scale && !(v > 0.0)) {
            throw ValidationError("AR(1) on log scale: " + x.name() + " is non-positive in year " +
                                  std::to_string(x.start_year() + int(i)));
        }
        y[i] = log_scale ? std::log(v) : v;
    }
    const auto n = Eigen::Index(y.size() - 1);
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd response(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = y[std::size_t(i)];
        response(i) = y[std::size_t(i + 1)];
    }
    Ar1Fit out;
    out.fit = ols(Design({"intercept", "slope"}, X), response);
    out.coefs = {out.fit.coef("intercept"), out.fit.coef("slope")};
    out.p_value_unit_slope = out.fit.p_value_for("slope", 1.0);
    out.residuals = residual_series(std::move(residual_name), x.start_year() + 1, out.fit.residuals);
    return out;
}

BondFit fit_bond(const AnnualSeries& B, const AnnualSeries& R) {
    if (B.empty() || R.size() < 2) throw ValidationError("bond fit needs B and at least two R values");
    const int first = std::max(B.start_year(), R.start_year() + 1);
    const int last = std::min(B.end_year(), R.end_year());
    if (last - first + 1 < kMinBondOverlap) {
        throw ValidationError("bond fit needs at least " + std::to_string(kMinBondOverlap) +
                              " overlapping years of B and R");
    }
    const auto n = Eigen::Index(last - first + 1);
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int t = first + int(i);
        X(i, 0) = 1.0;
        X(i, 1) = R.at(t) - R.at(t - 1);
        y(i) = B.at(t) - 0.01 * R.at(t - 1);
    }
    BondFit out;
    out.fit = ols(Design({"intercept", "rate_change"}, X), y);
    out.coefs = {-out.fit.coef("intercept"), -out.fit.coef("rate_change")};
    out.residuals = residual_series("Z_B", first, out.fit.residuals);
    return out;
}

ValuationParams valuation_from_regression(double alpha, double beta, double gamma) {
    if (!std::isfinite(gamma) || std::abs(gamma) < 1e-8) {
        throw ValidationError("cannot identify c = beta/gamma: gamma is " + std::to_string(gamma));
    }
    ValuationParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.gamma = gamma;
    p.b = 1.0 - gamma;
    p.c = beta / gamma;
    p.h = (alpha - p.c) / gamma;
    return p;
}

ValuationFit fit_valuation(const AnnualSeries& Q, const AnnualSeries& G_bar, int window) {
    const YearRange years = common_years({&Q, &G_bar});
    if (years.count() < kMinValuationYears) {
        throw ValidationError("valuation fit needs at least " + std::to_string(kMinValuationYears) +
                              " common years of Q and Gbar");
    }
    const auto n = Eigen::Index(years.count());
    Eigen::MatrixXd X(n, 3);
    Eigen::VectorXd y(n);
    std::vector<double> cumulative(std::size_t(n) + 1, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int year = years.first + int(i);
        const double d = Q.at(year) - G_bar.at(year);
        X(i, 0) = 1.0;
        X(i, 1) = double(i);  // t - 1
        X(i, 2) = cumulative[std::size_t(i)];
        y(i) = d;
        cumulative[std::size_t(i) + 1] = cumulative[std::size_t(i)] + d;
    }
    ValuationFit out;
    out.fit = ols(Design({"alpha", "beta", "neg_gamma"}, X), y);
    out.params = valuation_from_regression(out.fit.coef("alpha"), out.fit.coef("beta"), -out.fit.coef("neg_gamma"));
    out.params.window = window;

    std::vector<double> h(std::size_t(n) + 1);
    for (std::size_t t = 0; t <= std::size_t(n); ++t) h[t] = cumulative[t] - out.params.c * double(t);
    out.params.H_series = AnnualSeries("H", years.first - 1, std::move(h), Units::Dimensionless);
    out.residuals = residual_series("U", years.first, out.fit.residuals);
    return out;
}

ScaledFit fit_scaled(const AnnualSeries& response, const std::vector<Regressor>& regressors,
                     const AnnualSeries& V, std::string residual_name, bool volatility_term) {
    std::vector<const AnnualSeries*> all{&response, &V};
    for (const auto& r : regressors) all.push_back(&r.series);
    const YearRange years = common_years(all);
    const auto n = Eigen::Index(years.count());
    const auto p = Eigen::Index(regressors.size() + 1 + (volatility_term ? 1 : 0));

    std::vector<std::string> names{"intercept"};
    for (const auto& r : regressors) names.push_back(r.name);
    if (volatility_term) names.emplace_back("volatility");

    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int year = years.first + int(i);
        const double v = V.at(year);
        if (!(v > 0.0)) {
            throw ValidationError("scaled regression: V is not positive in year " + std::to_string(year));
        }
        X(i, 0) = 1.0 / v;
        for (std::size_t k = 0; k < regressors.size(); ++k) X(i, Eigen::Index(k + 1)) = regressors[k].series.at(year) / v;
        if (volatility_term) X(i, p - 1) = 1.0;
        y(i) = response.at(year) / v;
    }
    ScaledFit out;
    out.fit = ols(Design(names, X), y);
    out.residuals = residual_series(std::move(residual_name), years.first, out.fit.residuals);
    return out;
}

std::vector<LagSelectionRow> lag_selection(const AnnualSeries& Q, const AnnualSeries& earnings, int min_window,
                                           int max_window) {
    if (min_window < 1 || max_window > 10 || min_window > max_window) {
        throw ValidationError("lag selection windows must satisfy 1 <= min <= max <= 10");
    }
    std::vector<LagSelectionRow> rows;
    for (int L = min_window; L <= max_window; ++L) {
        const AnnualSeries g_bar = log_growth(trailing_average(earnings, L), "G_bar");
        ValuationFit fit = fit_valuation(Q, g_bar, L);
        LagSelectionRow row;
        row.window = L;
        row.r_squared = fit.fit.r_squared;
        row.residuals = diagnose("U(L=" + std::to_string(L) + ")", fit.residuals.values());
        row.params = std::move(fit.params);
        rows.push_back(std::move(row));
    }
    return rows;
}

ModelFits fit_all(const DerivedSeries& data, const FitOptions& options) {
    ModelFits f;
    f.window = data.window;
    f.vol = fit_ar1(data.V, true, "Z_V");
    f.rate = fit_ar1(data.R, true, "Z_R");
    f.spread = fit_ar1(data.S, false, "Z_S");
    f.bond = fit_bond(data.B, data.R);
    f.valuation = fit_valuation(data.Q, data.G_bar, data.window);

    const AnnualSeries spread_lag = data.S.lagged(1, "spread");
    const AnnualSeries rate_change = data.R.diff("rate_change");
    const AnnualSeries valuation_lag = f.valuation.params.H_series.lagged(1, "valuation");

    f.growth = fit_scaled(data.G, {{"spread", spread_lag}, {"rate_change", rate_change}}, data.V, "Z_G");
    f.domestic = fit_scaled(data.Q,
                            {{"spread", spread_lag}, {"rate_change", rate_change}, {"valuation", valuation_lag}},
                            data.V, "Z_Q");
    f.intl = fit_scaled(data.I, {{"rate_change", rate_change}, {"valuation", valuation_lag}}, data.V, "Z_I");
    if (options.intl_with_spread) {
        f.intl_with_spread = fit_scaled(
            data.I, {{"spread", spread_lag}, {"rate_change", rate_change}, {"valuation", valuation_lag}}, data.V,
            "Z_I");
    }
    return f;
}

ModelSpec assemble_model(const ModelFits& f, const DerivedSeries& data, const FitOptions& options) {
    ModelSpec m;
    m.vol = f.vol.coefs;
    m.rate = f.rate.coefs;
    m.spread = f.spread.coefs;
    m.growth = {f.growth.coef("intercept"), f.growth.coef("spread"), f.growth.coef("volatility"),
                f.growth.coef("rate_change")};
    m.domestic = {f.domestic.coef("intercept"), f.domestic.coef("spread"), f.domestic.coef("volatility"),
                  f.domestic.coef("rate_change"), f.domestic.coef("valuation")};
    m.intl = {f.intl.coef("intercept"), f.intl.coef("volatility"), f.intl.coef("rate_change"),
              f.intl.coef("valuation")};
    m.bond = f.bond.coefs;
    m.valuation = f.valuation.params;

    const std::array<const AnnualSeries*, kNoiseDim> cols = {
        &f.vol.residuals,    &f.spread.residuals, &f.rate.residuals, &f.growth.residuals,
        &f.domestic.residuals, &f.intl.residuals, &f.bond.residuals};
    int first = std::numeric_limits<int>::max();
    int last = std::numeric_limits<int>::min();
    for (const auto* c : cols) {
        first = std::min(first, c->start_year());
        last = std::max(last, c->end_year());
    }
    for (std::size_t k = 0; k < kNoiseDim; ++k) {
        if (cols[k]->end_year() != last) {
            throw ValidationError("residual " + std::string(kInnovationNames[k]) + " ends in " +
                                  std::to_string(cols[k]->end_year()) + ", expected " + std::to_string(last));
        }
    }
    m.residuals.start_year = first;
    m.residuals.values.setConstant(last - first + 1, Eigen::Index(kNoiseDim), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < kNoiseDim; ++k) {
        for (int year = cols[k]->start_year(); year <= last; ++year) {
            m.residuals.values(year - first, Eigen::Index(k)) = cols[k]->at(year);
        }
    }

    // Reporting correlation in the order Z_V, Z_S, Z_R, Z_G, U, Z_Q, Z_I, Z_B.
    Eigen::MatrixXd report(m.residuals.rows(), 8);
    for (int r = 0; r < m.residuals.rows(); ++r) {
        const int year = first + r;
        report(r, 0) = m.residuals.values(r, kZV);
        report(r, 1) = m.residuals.values(r, kZS);
        report(r, 2) = m.residuals.values(r, kZR);
        report(r, 3) = m.residuals.values(r, kZG);
        report(r, 4) = f.valuation.residuals.contains(year) ? f.valuation.residuals.at(year)
                                                            : std::numeric_limits<double>::quiet_NaN();
        report(r, 5) = m.residuals.values(r, kZQ);
        report(r, 6) = m.residuals.values(r, kZI);
        report(r, 7) = m.residuals.values(r, kZB);
    }
    m.residuals.correlation_names = {"Z_V", "Z_S", "Z_R", "Z_G", "U", "Z_Q", "Z_I", "Z_B"};
    m.residuals.correlation = pairwise_correlation(report);

    m.fill_seed = options.fill_seed;
    m.filled = fill_missing(m.residuals, options.fill_seed);
    m.bandwidths = bandwidths(m.filled);

    const AnnualSeries& H = m.valuation.H_series;
    const int year = std::min({data.V.end_year(), data.R.end_year(), data.S.end_year(), H.end_year(),
                               data.E.end_year()});
    m.defaults.year = year;
    m.defaults.V = data.V.at(year);
    m.defaults.R = data.R.at(year);
    m.defaults.S = data.S.at(year);
    m.defaults.H = H.at(year);
    m.defaults.earnings.clear();
    for (int y = year - data.window + 1; y <= year; ++y) m.defaults.earnings.push_back(data.E.at(y));
    return m;
}

ModelSpec fit_model(const DerivedSeries& data, const FitOptions& options) {
    return assemble_model(fit_all(data, options), data, options);
}

std::vector<DiagnosticsReport> residual_reports(const ModelFits& f) {
    return {diagnose("Z_V", f.vol.residuals.values()),      diagnose("Z_S", f.spread.residuals.values()),
            diagnose("Z_R", f.rate.residuals.values()),     diagnose("Z_G", f.growth.residuals.values()),
            diagnose("U", f.valuation.residuals.values()),  diagnose("Z_Q", f.domestic.residuals.values()),
            diagnose("Z_I", f.intl.residuals.values()),     diagnose("Z_B", f.bond.residuals.values())};
}

std::vector<CoefficientRow> coefficient_table(const ModelFits& f) {
    std::vector<CoefficientRow> rows;
    auto add = [&](const std::string& eq, const LinearFit& fit) {
        for (std::size_t i = 0; i < fit.names.size(); ++i) {
            const auto k = Eigen::Index(i);
            rows.push_back({eq, fit.names[i], fit.coefficients(k), fit.stderrs(k), fit.p_values(k)});
        }
    };
    add("vol", f.vol.fit);
    add("rate", f.rate.fit);
    add("spread", f.spread.fit);
    add("bond", f.bond.fit);
    add("valuation", f.valuation.fit);
    add("growth", f.growth.fit);
    add("domestic", f.domestic.fit);
    add("intl", f.intl.fit);
    if (f.intl_with_spread) add("intl_with_spread", f.intl_with_spread->fit);
    return rows;
}

SimpleModelSpec fit_simple_model(const DerivedSeries& data) {
    SimpleModelSpec s;
    auto normalized_mean = [&](const AnnualSeries& y) {
        const YearRange years = common_years({&y, &data.V});
        double sum = 0.0;
        for (int t = years.first; t <= years.last; ++t) sum += y.at(t) / data.V.at(t);
        return sum / double(years.count());
    };
    s.g_Q = normalized_mean(data.Q);
    s.g_I = normalized_mean(data.I);

    const AnnualSeries rate_change = data.R.diff("rate_change");
    const ScaledFit q = fit_scaled(data.Q, {{"rate_change", rate_change}}, data.V, "Z_Q");
    const ScaledFit i = fit_scaled(data.I, {{"rate_change", rate_change}}, data.V, "Z_I");
    s.a_Q = q.coef("intercept");
    s.d_Q = -q.coef("rate_change");
    s.c_Q = q.coef("volatility");
    s.a_I = i.coef("intercept");
    s.d_I = -i.coef("rate_change");
    s.c_I = i.coef("volatility");

    const Ar1Fit vol = fit_ar1(data.V, true, "Z_V");
    const Ar1Fit rate = fit_ar1(data.R, true, "Z_R");
    const BondFit bond = fit_bond(data.B, data.R);
    const ScaledFit growth = fit_scaled(data.G, {}, data.V, "Z_G");
    const ValuationFit valuation = fit_valuation(data.Q, data.G_bar, data.window);

    auto correlation_of = [](const std::vector<const AnnualSeries*>& series) {
        int first = std::numeric_limits<int>::max();
        int last = std::numeric_limits<int>::min();
        for (const auto* s : series) {
            first = std::min(first, s->start_year());
            last = std::max(last, s->end_year());
        }
        Eigen::MatrixXd m(last - first + 1, Eigen::Index(series.size()));
        for (int year = first; year <= last; ++year) {
            for (std::size_t k = 0; k < series.size(); ++k) {
                m(year - first, Eigen::Index(k)) = series[k]->contains(year)
                                                       ? series[k]->at(year)
                                                       : std::numeric_limits<double>::quiet_NaN();
            }
        }
        return pairwise_correlation(m);
    };
    s.sigma5_names = {"Z_V", "Z_R", "Z_Q", "Z_I", "Z_B"};
    s.sigma5 = correlation_of({&vol.residuals, &rate.residuals, &q.residuals, &i.residuals, &bond.residuals});
    s.sigma3_names = {"Z_V", "Z_G", "U"};
    s.sigma3 = correlation_of({&vol.residuals, &growth.residuals, &valuation.residuals});
    return s;
}

}  // namespace assetsim
