#include "assetsim/reference.hpp"

#include "assetsim/econometrics.hpp"
#include "assetsim/errors.hpp"
#include "assetsim/rng.hpp"

#include <cmath>
#include <limits>

namespace assetsim {

namespace {

// Z_V, Z_S, Z_R, Z_G, U, Z_Q, Z_I, Z_B
constexpr double kCorrelation[8][8] = {
    {1.0000, 0.0538, 0.2978, -0.1800, -0.4234, -0.0516, -0.0753, 0.0725},
    {0.0538, 1.0000, -0.1817, -0.0661, -0.0608, -0.1581, -0.0397, -0.0951},
    {0.2978, -0.1817, 1.0000, -0.1628, -0.5177, -0.0979, -0.0265, -0.1470},
    {-0.1800, -0.0661, -0.1628, 1.0000, 0.1524, 0.1204, 0.0724, -0.1878},
    {-0.4234, -0.0608, -0.5177, 0.1524, 1.0000, 0.7038, 0.3228, 0.2714},
    {-0.0516, -0.1581, -0.0979, 0.1204, 0.7038, 1.0000, 0.2768, 0.2817},
    {-0.0753, -0.0397, -0.0265, 0.0724, 0.3228, 0.2768, 1.0000, -0.0948},
    {0.0725, -0.0951, -0.1470, -0.1878, 0.2714, 0.2817, -0.0948, 1.0000},
};

// Reporting index of each innovation column.
constexpr int kReportIndex[kNoiseDim] = {0, 1, 2, 3, 5, 6, 7};

// Leading missing years per innovation column.
constexpr int kLeadingGap[kNoiseDim] = {1, 0, 0, 0, 0, 42, 45};

}  // namespace

Eigen::MatrixXd published_correlation() {
    Eigen::MatrixXd m(8, 8);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) m(i, j) = kCorrelation[i][j];
    return m;
}

Eigen::MatrixXd published_innovation_correlation() {
    Eigen::MatrixXd m(kNoiseDim, kNoiseDim);
    for (std::size_t i = 0; i < kNoiseDim; ++i)
        for (std::size_t j = 0; j < kNoiseDim; ++j)
            m(Eigen::Index(i), Eigen::Index(j)) = kCorrelation[kReportIndex[i]][kReportIndex[j]];
    return m;
}

std::array<double, kNoiseDim> published_residual_stdev() {
    return {0.3644, 1.0537, 0.1357, 0.021, 0.0135, 0.0181, 0.0263};
}

InnovationRows reference_innovations(std::uint64_t seed) {
    const int n = kReferenceLastYear - kReferenceFirstYear + 1;
    const Eigen::LLT<Eigen::MatrixXd> llt(published_innovation_correlation());
    if (llt.info() != Eigen::Success) throw ValidationError("published correlation is not positive definite");
    const Eigen::MatrixXd L = llt.matrixL();

    Rng rng(seed, 0);
    Eigen::MatrixXd z(n, Eigen::Index(kNoiseDim));
    for (int r = 0; r < n; ++r)
        for (std::size_t c = 0; c < kNoiseDim; ++c) z(r, Eigen::Index(c)) = rng.normal();
    Eigen::MatrixXd x = z * L.transpose();

    const auto sd = published_residual_stdev();
    InnovationRows out(n, Eigen::Index(kNoiseDim));
    for (std::size_t c = 0; c < kNoiseDim; ++c) {
        Eigen::VectorXd col = x.col(Eigen::Index(c));
        col.array() -= col.mean();
        const double s = std::sqrt(col.squaredNorm() / double(n - 1));
        out.col(Eigen::Index(c)) = col * (sd[c] / s);
    }
    return out;
}

ResidualMatrix reference_residuals(std::uint64_t seed) {
    ResidualMatrix m;
    m.start_year = kReferenceFirstYear;
    m.values = reference_innovations(seed);
    for (std::size_t c = 0; c < kNoiseDim; ++c) {
        const auto col = Eigen::Index(c);
        const int gap = kLeadingGap[c];
        for (int r = 0; r < gap; ++r) m.values(r, col) = std::numeric_limits<double>::quiet_NaN();
        const int present = m.rows() - gap;
        const double mean = m.values.col(col).tail(present).mean();
        m.values.col(col).tail(present).array() -= mean;
    }
    m.correlation_names = {"Z_V", "Z_S", "Z_R", "Z_G", "U", "Z_Q", "Z_I", "Z_B"};
    m.correlation = published_correlation();
    return m;
}

FactorState reference_state() {
    FactorState s;
    s.year = kReferenceLastYear;
    s.V = 12.5;
    s.R = 5.9;
    s.S = 0.12;
    s.H = 0.09;
    s.earnings = {86.53, 94.55, 109.88, 132.39, 139.47, 94.13, 197.87, 172.75, 192.43, 208.0};
    return s;
}

ModelSpec reference_model(std::uint64_t seed) {
    ModelSpec m;
    m.name = "reference";
    m.vol = {0.847850, 0.620146};
    m.rate = {0.643694, 0.539518};
    m.spread = {0.6437, 0.5395};
    m.growth = {0.07756, 0.04786, -0.007841, 0.03721};
    m.domestic = {0.26851, -0.03412, -0.013568, -0.078238, -0.1644};
    m.intl = {0.2689, -0.0188, -0.0514, -0.0941};
    m.bond = {0.016611, 0.055884};
    m.valuation = valuation_from_regression(0.023893, 0.008608, 0.190133);
    m.valuation.window = 10;
    m.valuation.H_series = AnnualSeries("H", kReferenceLastYear, {0.09}, Units::Dimensionless);
    m.residuals = reference_residuals(seed);
    m.fill_seed = seed;
    m.filled = fill_missing(m.residuals, seed);
    m.bandwidths = bandwidths(m.filled);
    m.defaults = reference_state();
    return m;
}

}  // namespace assetsim
