#pragma once

#include "assetsim/model.hpp"
#include "assetsim/noise.hpp"

#include <array>
#include <cstdint>

namespace assetsim {

inline constexpr std::uint64_t kReferenceSeed = 20240601;
inline constexpr int kReferenceFirstYear = 1928;
inline constexpr int kReferenceLastYear = 2024;

/// Published residual correlations in the order Z_V, Z_S, Z_R, Z_G, U, Z_Q, Z_I, Z_B.
Eigen::MatrixXd published_correlation();
/// The 7x7 block without U, in innovation order.
Eigen::MatrixXd published_innovation_correlation();
/// Published residual standard deviations in innovation order.
std::array<double, kNoiseDim> published_residual_stdev();

/// 97 x 7 Gaussian innovations for 1928-2024 with the published correlations; each
/// column is demeaned and scaled to its published standard deviation.
InnovationRows reference_innovations(std::uint64_t seed = kReferenceSeed);

/// reference_innovations with the historical leading gaps (Z_V from 1929, Z_I from 1970,
/// Z_B from 1973) and present entries re-centered.
ResidualMatrix reference_residuals(std::uint64_t seed = kReferenceSeed);

/// End-2024 factor values and the 2015-2024 earnings window.
FactorState reference_state();

/// Published coefficient estimates with reference_residuals() as the innovation sample.
ModelSpec reference_model(std::uint64_t seed = kReferenceSeed);

}  // namespace assetsim
