#pragma once

#include "assetsim/noise.hpp"
#include "assetsim/series.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace assetsim {

/// Markov state of the simulator. The earnings window holds E(t - L + 1), ..., E(t).
struct FactorState {
    double V = 0.0;  ///< volatility, percent
    double R = 0.0;  ///< BAA rate, percent
    double S = 0.0;  ///< term spread, percent points
    double H = 0.0;  ///< valuation measure
    std::vector<double> earnings;
    int year = 0;
};

/// Signed coefficients: each field multiplies its regressor as stored.
struct Ar1Coefs {
    double intercept = 0.0;
    double slope = 0.0;
};

struct GrowthCoefs {
    double intercept = 0.0;
    double spread = 0.0;       ///< on S(t-1)
    double vol = 0.0;          ///< on V(t)
    double rate_change = 0.0;  ///< on R(t) - R(t-1)
};

struct DomesticCoefs {
    double intercept = 0.0;
    double spread = 0.0;
    double vol = 0.0;
    double rate_change = 0.0;
    double valuation = 0.0;  ///< on H(t-1); equals -k_Q
};

struct IntlCoefs {
    double intercept = 0.0;
    double vol = 0.0;
    double rate_change = 0.0;
    double valuation = 0.0;
};

/// B(t) = 0.01 R(t-1) - a - d (R(t) - R(t-1)) + Z_B(t).
struct BondCoefs {
    double a = 0.0;
    double d = 0.0;
};

/// Trend-plus-AR(1) valuation measure. Regression form
///   Q(t) - Gbar(t) = alpha + beta (t - 1) - gamma sum_{s<t} (Q(s) - Gbar(s)) + U(t)
/// and the equivalent H(t) - h = b (H(t-1) - h) + U(t), H(t) = sum_{s<=t}(Q - Gbar) - c t.
struct ValuationParams {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double b = 0.0;
    double c = 0.0;
    double h = 0.0;
    int window = 10;
    AnnualSeries H_series;
};

struct GateReport {
    bool vol = false;
    bool rate = false;
    bool spread = false;
    bool valuation = false;  ///< k_Q in (0, 2)

    bool passed() const noexcept { return vol && rate && spread && valuation; }
    std::vector<std::string> failures() const;
};

struct ModelSpec {
    static constexpr int kSchemaVersion = 1;

    std::string name = "fitted";
    Ar1Coefs vol;     ///< on ln V
    Ar1Coefs rate;    ///< on ln R
    Ar1Coefs spread;  ///< on S
    GrowthCoefs growth;
    DomesticCoefs domestic;
    IntlCoefs intl;
    BondCoefs bond;
    ValuationParams valuation;

    ResidualMatrix residuals;  ///< as fitted, NaN where missing
    ResidualMatrix filled;
    BandwidthVector bandwidths;
    std::uint64_t fill_seed = 0;

    FactorState defaults;

    GateReport gate() const;
};

/// |b_V|, |b_R|, |b_S| < 1 and k_Q = -domestic.valuation in (0, 2).
GateReport stationarity_gate(const ModelSpec& model);

}  // namespace assetsim
