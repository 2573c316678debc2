#pragma once

#include "assetsim/dataio.hpp"
#include "assetsim/model.hpp"
#include "assetsim/noise.hpp"

#include <cstdint>
#include <filesystem>

namespace assetsim {

/// Simulated history: the factor and return series the model generated, plus a raw
/// bundle from which derive_series recovers them (V with 252-day annualization).
struct SyntheticHistory {
    RawBundle bundle;
    AnnualSeries V, R, S, H, Q, I, B, E, G;  ///< truth; H anchored at 0 the year before innovations start
    InnovationRows innovations;
    int first_year = 0;  ///< year of the first innovation row
};

struct SyntheticOptions {
    std::uint64_t seed = 1;
    int first_year = 1928;
    int burn_in = 10;  ///< Gaussian pre-sample years that build the initial earnings window
    double eafe_weight = 0.6;
    int blend_start_year = 1988;
    int intl_start_year = 1970;
    int bond_index_start_year = 1972;
};

/// Drives `step` with the given innovation rows (one per year from options.first_year).
SyntheticHistory simulate_history(const ModelSpec& model, const InnovationRows& innovations,
                                  const SyntheticOptions& options = {});

/// IID Gaussian innovation rows with the given correlation and standard deviations.
InnovationRows gaussian_innovations(int rows, const Eigen::MatrixXd& correlation,
                                    const std::array<double, kNoiseDim>& stdev, std::uint64_t seed);

/// Writes daily.csv, the annual CSVs and manifest.json into `dir`.
void write_bundle(const std::filesystem::path& dir, const RawBundle& bundle);

}  // namespace assetsim
