#pragma once

#include "assetsim/dataio.hpp"
#include "assetsim/diagnostics.hpp"
#include "assetsim/model.hpp"
#include "assetsim/ols.hpp"
#include "assetsim/series.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace assetsim {

struct Ar1Fit {
    Ar1Coefs coefs;
    double p_value_unit_slope = 1.0;  ///< H0: slope == 1
    LinearFit fit;
    AnnualSeries residuals;
};

/// OLS of y(t) on [1, y(t-1)], y = ln x when log_scale.
Ar1Fit fit_ar1(const AnnualSeries& x, bool log_scale, std::string residual_name);

struct BondFit {
    BondCoefs coefs;
    LinearFit fit;
    AnnualSeries residuals;
};

/// OLS of B(t) - 0.01 R(t-1) on [1, R(t) - R(t-1)]; a = -intercept, d = -slope.
BondFit fit_bond(const AnnualSeries& B, const AnnualSeries& R);

/// b = 1 - gamma, c = beta / gamma, h = (alpha - c) / gamma.
ValuationParams valuation_from_regression(double alpha, double beta, double gamma);

struct ValuationFit {
    ValuationParams params;
    LinearFit fit;
    AnnualSeries residuals;  ///< U
};

/// Regresses Q(t) - Gbar(t) on [1, t - 1, sum_{s<t}(Q(s) - Gbar(s))] over the common years.
/// t = 0 is the year before the first common year and H(0) = 0, so
/// H(t) = sum_{s<=t}(Q(s) - Gbar(s)) - c t.
ValuationFit fit_valuation(const AnnualSeries& Q, const AnnualSeries& G_bar, int window);

struct Regressor {
    std::string name;
    AnnualSeries series;
};

/// Estimates y = b0 + sum b_i x_i + c V + V Z by regressing y/V on
/// [1/V, x_1/V, ..., 1]. Coefficient "intercept" is b0, "volatility" is c and the
/// residuals are Z. Without the volatility column the model is y = b0 + sum b_i x_i + V Z.
struct ScaledFit {
    LinearFit fit;
    AnnualSeries residuals;

    double coef(std::string_view name) const { return fit.coef(name); }
};

ScaledFit fit_scaled(const AnnualSeries& response, const std::vector<Regressor>& regressors,
                     const AnnualSeries& V, std::string residual_name, bool volatility_term = true);

struct LagSelectionRow {
    int window = 0;
    double r_squared = 0.0;
    ValuationParams params;
    DiagnosticsReport residuals;
};

std::vector<LagSelectionRow> lag_selection(const AnnualSeries& Q, const AnnualSeries& earnings,
                                           int min_window = 1, int max_window = 10);

struct FitOptions {
    std::uint64_t fill_seed = 2024;
    bool intl_with_spread = false;  ///< also fit the international equation with S(t-1)
};

struct ModelFits {
    int window = 10;
    Ar1Fit vol, rate, spread;
    BondFit bond;
    ValuationFit valuation;
    ScaledFit growth, domestic, intl;
    std::optional<ScaledFit> intl_with_spread;
};

ModelFits fit_all(const DerivedSeries& data, const FitOptions& options = {});

/// Packages coefficients, builds the 7-column residual matrix with the 8x8 reporting
/// correlation (U included), fills and bandwidths, and sets defaults to the last
/// common historical year.
ModelSpec assemble_model(const ModelFits& fits, const DerivedSeries& data, const FitOptions& options = {});

ModelSpec fit_model(const DerivedSeries& data, const FitOptions& options = {});

/// White-noise reports for Z_V, Z_S, Z_R, Z_G, U, Z_Q, Z_I, Z_B.
std::vector<DiagnosticsReport> residual_reports(const ModelFits& fits);

/// Coefficient table: one row per (equation, coefficient).
struct CoefficientRow {
    std::string equation;
    std::string name;
    double estimate = 0.0;
    double stderr_ = 0.0;
    double p_value = 1.0;
};
std::vector<CoefficientRow> coefficient_table(const ModelFits& fits);

/// Simplified model: normalized returns with constant means, and the duration system
/// Q = a_Q - d_Q dR + c_Q V + V Z (same for I).
struct SimpleModelSpec {
    double g_Q = 0.0;
    double g_I = 0.0;
    double a_Q = 0.0, d_Q = 0.0, c_Q = 0.0;
    double a_I = 0.0, d_I = 0.0, c_I = 0.0;
    std::vector<std::string> sigma3_names;
    Eigen::MatrixXd sigma3;
    std::vector<std::string> sigma5_names;
    Eigen::MatrixXd sigma5;
};

SimpleModelSpec fit_simple_model(const DerivedSeries& data);

}  // namespace assetsim
