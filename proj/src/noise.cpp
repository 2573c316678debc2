#include "assetsim/noise.hpp"

#include "assetsim/errors.hpp"
#include "assetsim/ols.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace assetsim {

bool ResidualMatrix::missing(int row, std::size_t col) const {
    return std::isnan(values(row, Eigen::Index(col)));
}

int ResidualMatrix::present_count(std::size_t col) const {
    int count = 0;
    for (int r = 0; r < rows(); ++r) count += missing(r, col) ? 0 : 1;
    return count;
}

bool ResidualMatrix::complete() const { return !values.hasNaN(); }

std::vector<double> ResidualMatrix::present(std::size_t col) const {
    std::vector<double> out;
    for (int r = 0; r < rows(); ++r) {
        if (!missing(r, col)) out.push_back(values(r, Eigen::Index(col)));
    }
    return out;
}

Eigen::MatrixXd pairwise_correlation(const Eigen::MatrixXd& columns) {
    const Eigen::Index k = columns.cols();
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = i + 1; j < k; ++j) {
            std::vector<std::pair<double, double>> pairs;
            for (Eigen::Index r = 0; r < columns.rows(); ++r) {
                const double a = columns(r, i);
                const double b = columns(r, j);
                if (!std::isnan(a) && !std::isnan(b)) pairs.emplace_back(a, b);
            }
            double c = std::numeric_limits<double>::quiet_NaN();
            if (pairs.size() >= 3) {
                double ma = 0.0, mb = 0.0;
                for (auto [a, b] : pairs) {
                    ma += a;
                    mb += b;
                }
                ma /= double(pairs.size());
                mb /= double(pairs.size());
                double sab = 0.0, saa = 0.0, sbb = 0.0;
                for (auto [a, b] : pairs) {
                    sab += (a - ma) * (b - mb);
                    saa += (a - ma) * (a - ma);
                    sbb += (b - mb) * (b - mb);
                }
                if (saa > 0.0 && sbb > 0.0) c = sab / std::sqrt(saa * sbb);
            }
            corr(i, j) = corr(j, i) = c;
        }
    }
    return corr;
}

ResidualMatrix fill_missing(const ResidualMatrix& matrix, std::uint64_t seed) {
    static constexpr std::size_t kFillOrder[] = {kZV, kZI, kZB};

    std::vector<std::size_t> incomplete;
    for (std::size_t c = 0; c < kNoiseDim; ++c) {
        if (matrix.present_count(c) < matrix.rows()) incomplete.push_back(c);
    }
    for (std::size_t c : incomplete) {
        if (std::find(std::begin(kFillOrder), std::end(kFillOrder), c) == std::end(kFillOrder)) {
            throw ValidationError("column " + std::string(kInnovationNames[c]) +
                                  " has missing entries; only Z_V, Z_I and Z_B may be incomplete");
        }
    }

    ResidualMatrix out = matrix;
    std::vector<bool> complete(kNoiseDim);
    for (std::size_t c = 0; c < kNoiseDim; ++c) complete[c] = out.present_count(c) == out.rows();

    for (std::size_t target : kFillOrder) {
        if (complete[target]) continue;
        std::vector<std::size_t> regressors;
        for (std::size_t c = 0; c < kNoiseDim; ++c) {
            if (c != target && complete[c]) regressors.push_back(c);
        }
        std::vector<int> observed, missing_rows;
        for (int r = 0; r < out.rows(); ++r) (out.missing(r, target) ? missing_rows : observed).push_back(r);
        const std::size_t p = regressors.size() + 1;
        if (observed.size() < p + 2) {
            throw ValidationError("cannot fill " + std::string(kInnovationNames[target]) + ": only " +
                                  std::to_string(observed.size()) + " co-observed rows for " +
                                  std::to_string(p) + " regressors");
        }

        auto design_row = [&](int r, Eigen::MatrixXd& X, Eigen::Index row) {
            X(row, 0) = 1.0;
            for (std::size_t k = 0; k < regressors.size(); ++k) {
                X(row, Eigen::Index(k + 1)) = out.values(r, Eigen::Index(regressors[k]));
            }
        };
        std::vector<std::string> names{"const"};
        for (std::size_t c : regressors) names.emplace_back(kInnovationNames[c]);
        Eigen::MatrixXd X(Eigen::Index(observed.size()), Eigen::Index(p));
        Eigen::VectorXd y(Eigen::Index(observed.size()));
        for (std::size_t i = 0; i < observed.size(); ++i) {
            design_row(observed[i], X, Eigen::Index(i));
            y(Eigen::Index(i)) = out.values(observed[i], Eigen::Index(target));
        }
        const LinearFit fit = ols(Design(names, X), y);

        Rng rng(seed, target);
        Eigen::MatrixXd row(1, Eigen::Index(p));
        for (int r : missing_rows) {
            design_row(r, row, 0);
            const double fitted = (row * fit.coefficients)(0);
            const auto pick = Eigen::Index(rng.index(std::size_t(fit.residuals.size())));
            out.values(r, Eigen::Index(target)) = fitted + fit.residuals(pick);
        }
        complete[target] = true;
    }
    return out;
}

double linear_quantile(std::vector<double> values, double p) {
    if (values.empty()) throw ValidationError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = p * double(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - double(lo)) * (values[hi] - values[lo]);
}

double silverman_bandwidth(std::span<const double> column, int d) {
    const std::size_t n = column.size();
    if (n < 4) throw ValidationError("bandwidth needs at least 4 observations");
    double mean = 0.0;
    for (double v : column) mean += v;
    mean /= double(n);
    double ss = 0.0;
    for (double v : column) ss += (v - mean) * (v - mean);
    const double s = std::sqrt(ss / double(n - 1));
    std::vector<double> sorted(column.begin(), column.end());
    const double iqr = linear_quantile(sorted, 0.75) - linear_quantile(sorted, 0.25);
    const double spread = std::min(s, iqr / 1.34);
    if (!(spread > 0.0)) throw ValidationError("bandwidth undefined: column has zero spread");
    const double dd = double(d);
    return std::pow(4.0 / (dd + 2.0), 1.0 / (dd + 4.0)) * std::pow(double(n), -1.0 / (dd + 4.0)) * spread;
}

BandwidthVector bandwidths(const ResidualMatrix& filled) {
    if (!filled.complete()) throw ValidationError("bandwidths need a complete residual matrix");
    BandwidthVector bw;
    bw.n = filled.rows();
    for (std::size_t c = 0; c < kNoiseDim; ++c) {
        const auto col = filled.present(c);
        try {
            bw.sigma[c] = silverman_bandwidth(col, bw.d);
        } catch (const ValidationError& e) {
            throw ValidationError(std::string(kInnovationNames[c]) + ": " + e.what());
        }
    }
    return bw;
}

KdeSampler::KdeSampler(const ResidualMatrix& filled, const BandwidthVector& bandwidths)
    : rows_(filled.values), sigma_(bandwidths.sigma) {
    if (!filled.complete()) throw ValidationError("sampler needs a complete residual matrix");
    if (rows_.rows() == 0) throw ValidationError("sampler needs at least one residual row");
    for (double s : sigma_) {
        if (!(s >= 0.0) || !std::isfinite(s)) throw ValidationError("bandwidths must be finite and >= 0");
    }
}

NoiseDraw KdeSampler::sample(Rng& rng) const {
    const auto tau = Eigen::Index(rng.index(std::size_t(rows_.rows())));
    NoiseDraw z;
    for (std::size_t i = 0; i < kNoiseDim; ++i) z[i] = rows_(tau, Eigen::Index(i)) + sigma_[i] * rng.normal();
    return z;
}

void write_residuals_csv(std::ostream& os, const ResidualMatrix& matrix) {
    os << "year";
    for (auto name : kInnovationNames) os << ',' << name;
    os << '\n' << std::setprecision(17);
    for (int r = 0; r < matrix.rows(); ++r) {
        os << matrix.start_year + r;
        for (std::size_t c = 0; c < kNoiseDim; ++c) {
            os << ',';
            if (!matrix.missing(r, c)) os << matrix.values(r, Eigen::Index(c));
        }
        os << '\n';
    }
}

}  // namespace assetsim
