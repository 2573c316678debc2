#include "assetsim/ols.hpp"

#include "assetsim/errors.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>

namespace assetsim {

namespace {

double two_sided_p(double t, int dof) {
    if (!std::isfinite(t)) return 0.0;
    const boost::math::students_t dist(dof);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

bool has_constant_column(const Eigen::MatrixXd& X) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double first = X(0, j);
        if (first != 0.0 && (X.col(j).array() == first).all()) return true;
    }
    return false;
}

}  // namespace

std::size_t LinearFit::index(std::string_view name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw ValidationError("fit has no coefficient '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - names.begin());
}

double LinearFit::p_value_for(std::string_view name, double value) const {
    const auto i = Eigen::Index(index(name));
    return two_sided_p((coefficients(i) - value) / stderrs(i), dof);
}

std::pair<double, double> LinearFit::confidence_interval(std::string_view name, double coverage) const {
    const auto i = Eigen::Index(index(name));
    const boost::math::students_t dist(dof);
    const double q = boost::math::quantile(dist, 0.5 + coverage / 2.0);
    return {coefficients(i) - q * stderrs(i), coefficients(i) + q * stderrs(i)};
}

LinearFit ols(const Design& design, const Eigen::VectorXd& y) {
    const Eigen::MatrixXd& X = design.X;
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (static_cast<Eigen::Index>(design.names.size()) != p) {
        throw ValidationError("design has " + std::to_string(p) + " columns but " +
                              std::to_string(design.names.size()) + " names");
    }
    if (y.size() != n) throw ValidationError("response length does not match design rows");
    if (n < p + 1) {
        throw ValidationError("regression needs more rows than columns (" + std::to_string(n) + " rows, " +
                              std::to_string(p) + " columns)");
    }
    if (!X.allFinite() || !y.allFinite()) throw ValidationError("regression data contain non-finite values");

    // Scale columns so the rank threshold is unit-free.
    Eigen::VectorXd norms = X.colwise().norm().transpose();
    std::vector<std::string> zero_cols;
    for (Eigen::Index j = 0; j < p; ++j) {
        if (norms(j) == 0.0) zero_cols.push_back(design.names[std::size_t(j)]);
    }
    if (!zero_cols.empty()) {
        std::string msg = "rank-deficient design: zero column";
        for (const auto& c : zero_cols) msg += " '" + c + "'";
        throw RankError(msg, zero_cols);
    }
    const Eigen::MatrixXd Xs = X * norms.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) {
        std::vector<std::string> collinear;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index k = qr.rank(); k < p; ++k) collinear.push_back(design.names[std::size_t(perm(k))]);
        std::string msg = "rank-deficient design: column";
        for (const auto& c : collinear) msg += " '" + c + "'";
        msg += " collinear with the others";
        throw RankError(msg, collinear);
    }

    LinearFit fit;
    fit.names = design.names;
    fit.n_obs = static_cast<int>(n);
    fit.dof = static_cast<int>(n - p);
    fit.coefficients = qr.solve(y).cwiseQuotient(norms);
    fit.residuals = y - X * fit.coefficients;
    const double rss = fit.residuals.squaredNorm();
    fit.sigma2 = rss / double(fit.dof);

    const Eigen::MatrixXd xtx_inv_scaled =
        (Xs.transpose() * Xs).ldlt().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::VectorXd inv_norms = norms.cwiseInverse();
    fit.covariance = fit.sigma2 * inv_norms.asDiagonal() * xtx_inv_scaled * inv_norms.asDiagonal();
    fit.stderrs = fit.covariance.diagonal().cwiseSqrt();
    fit.t_stats = fit.coefficients.cwiseQuotient(fit.stderrs);
    fit.p_values.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) fit.p_values(j) = two_sided_p(fit.t_stats(j), fit.dof);

    const double tss = has_constant_column(X) ? (y.array() - y.mean()).square().sum() : y.squaredNorm();
    fit.r_squared = tss > 0.0 ? std::clamp(1.0 - rss / tss, 0.0, 1.0) : 1.0;
    return fit;
}

}  // namespace assetsim
