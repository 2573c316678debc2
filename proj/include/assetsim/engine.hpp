#pragma once

#include "assetsim/model.hpp"
#include "assetsim/noise.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace assetsim {

struct StepOutput {
    FactorState state;
    double Q = 0.0;
    double I = 0.0;
    double B = 0.0;
    double G = 0.0;
    double G_bar = 0.0;
};

/// One year of the factor and return recursions. The earnings window is rescaled when
/// it drifts toward overflow; only ratios of window entries enter the dynamics.
StepOutput step(const ModelSpec& model, const FactorState& state, const NoiseDraw& noise);

enum class CashflowDirection { Contribute, Withdraw };

struct Cashflow {
    double amount = 0.0;  ///< first-year amount, >= 0
    CashflowDirection direction = CashflowDirection::Withdraw;
    double growth_rate = 0.0;
    int frequency = 1;  ///< sub-periods per year: 1, 4 or 12
};

struct FactorOverrides {
    std::optional<double> V, R, S, H;
};

inline constexpr int kMaxHorizon = 50;
inline constexpr int kMinPaths = 100;
inline constexpr int kMaxPaths = 100000;

struct SimConfig {
    double initial_wealth = 1.0;
    int horizon = 30;
    double stock_share_start = 0.6;
    double stock_share_end = 0.6;
    double domestic_share = 0.5;
    Cashflow cashflow;
    int n_paths = 10000;
    std::uint64_t master_seed = 0;
    FactorOverrides factor_overrides;
};

/// Throws FieldError naming every invalid field.
void validate(const SimConfig& config);

struct Weights {
    double domestic = 0.0;
    double intl = 0.0;
    double bond = 0.0;
};

/// Stock share start + (end - start) t / horizon split by domestic_share; bonds take the rest.
Weights glidepath(const SimConfig& config, int t);

/// Year-end value of T equal payments w/T made at the end of each sub-period while the
/// portfolio earns r per year (any T >= 1; requests allow 1, 4 and 12): (w r / T) / ((1 + r)^(1/T) - 1), and w as r -> 0.
double effective_cashflow(double w, double r, int T);

struct WealthPath {
    std::uint64_t path_index = 0;
    std::vector<double> wealth;  ///< horizon + 1 values, wealth[0] = initial
    std::optional<int> ruin_year;
    std::vector<std::array<double, 3>> returns;  ///< log (Q, I, B) per year
};

struct EnsembleResult {
    std::map<int, WealthPath> percentile_paths;  ///< keys 10, 30, 50, 70, 90
    double ruin_probability = 0.0;
    std::optional<double> mean_ruin_year;
    double mean_final_wealth = 0.0;
    double p90_final_wealth = 0.0;  ///< final wealth of the 90% path
    int n_paths = 0;
    std::uint64_t master_seed = 0;
    int start_year = 0;
};

inline constexpr std::array<int, 5> kPercentiles = {10, 30, 50, 70, 90};

/// Initial factors from the model defaults with any overrides applied.
FactorState initial_state(const ModelSpec& model, const SimConfig& config);

class Simulator {
public:
    /// Throws NonStationaryError when the model fails the gate and force is false.
    explicit Simulator(const ModelSpec& model, bool force = false);

    /// Path draws come from stream (master_seed, path_index).
    WealthPath simulate_path(const SimConfig& config, std::uint64_t path_index) const;

    /// Results do not depend on `workers`.
    EnsembleResult run_ensemble(const SimConfig& config, int workers = 1) const;

    const ModelSpec& model() const noexcept { return model_; }
    const KdeSampler& sampler() const noexcept { return sampler_; }

private:
    const ModelSpec& model_;
    KdeSampler sampler_;
};

/// Factor trajectory of a single long path: columns ln V, ln R, S, H.
Eigen::MatrixXd simulate_factors(const ModelSpec& model, int years, std::uint64_t seed, bool force = false);

}  // namespace assetsim
