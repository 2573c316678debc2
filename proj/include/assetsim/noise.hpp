#pragma once

#include "assetsim/rng.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace assetsim {

inline constexpr std::size_t kNoiseDim = 7;

/// Column order of the innovation matrix.
enum Innovation : std::size_t { kZV = 0, kZS, kZR, kZG, kZQ, kZI, kZB };
inline constexpr std::array<std::string_view, kNoiseDim> kInnovationNames = {"Z_V", "Z_S", "Z_R", "Z_G",
                                                                           "Z_Q", "Z_I", "Z_B"};

using NoiseDraw = std::array<double, kNoiseDim>;
using InnovationRows = Eigen::Matrix<double, Eigen::Dynamic, static_cast<int>(kNoiseDim)>;

/// Year x 7 innovations, NaN marking missing entries. The correlation block is for
/// reporting only and may include series (such as U) that are never simulated.
struct ResidualMatrix {
    int start_year = 0;
    InnovationRows values;
    std::vector<std::string> correlation_names;
    Eigen::MatrixXd correlation;

    int rows() const { return static_cast<int>(values.rows()); }
    int end_year() const { return start_year + rows() - 1; }
    bool missing(int row, std::size_t col) const;
    int present_count(std::size_t col) const;
    bool complete() const;
    std::vector<double> present(std::size_t col) const;
};

/// Correlations over pairwise-complete rows of the columns (NaN = missing).
Eigen::MatrixXd pairwise_correlation(const Eigen::MatrixXd& columns);

/// Fills Z_V, then Z_I, then Z_B: each missing entry is the OLS fit on all complete
/// columns plus a residual resampled uniformly with replacement. Filled columns join
/// the regressor set for the next one. Observed entries are untouched.
ResidualMatrix fill_missing(const ResidualMatrix& matrix, std::uint64_t seed);

struct BandwidthVector {
    std::array<double, kNoiseDim> sigma{};
    int d = static_cast<int>(kNoiseDim);
    int n = 0;
};

/// Empirical quantile with linear interpolation between order statistics.
double linear_quantile(std::vector<double> values, double p);

/// (4/(d+2))^(1/(d+4)) * N^(-1/(d+4)) * min(s, IQR/1.34), s with divisor N - 1.
double silverman_bandwidth(std::span<const double> column, int d);

BandwidthVector bandwidths(const ResidualMatrix& filled);

/// Product-Gaussian KDE over the historical rows: a uniformly chosen row plus
/// independent N(0, sigma_i^2) perturbations. Zero bandwidths are allowed and
/// reduce the sampler to row resampling.
class KdeSampler {
public:
    KdeSampler(const ResidualMatrix& filled, const BandwidthVector& bandwidths);

    NoiseDraw sample(Rng& rng) const;
    const InnovationRows& rows() const noexcept { return rows_; }
    const std::array<double, kNoiseDim>& sigma() const noexcept { return sigma_; }

private:
    InnovationRows rows_;
    std::array<double, kNoiseDim> sigma_{};
};

void write_residuals_csv(std::ostream& os, const ResidualMatrix& matrix);

}  // namespace assetsim
