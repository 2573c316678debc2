#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace assetsim {

/// Regressor matrix with one name per column.
struct Design {
    std::vector<std::string> names;
    Eigen::MatrixXd X;

    Design() = default;
    Design(std::vector<std::string> column_names, Eigen::MatrixXd matrix)
        : names(std::move(column_names)), X(std::move(matrix)) {}
};

struct LinearFit {
    std::vector<std::string> names;
    Eigen::VectorXd coefficients;
    Eigen::VectorXd stderrs;
    Eigen::VectorXd t_stats;
    Eigen::VectorXd p_values;
    Eigen::MatrixXd covariance;
    Eigen::VectorXd residuals;
    double r_squared = 0.0;
    double sigma2 = 0.0;  ///< RSS / (n - p)
    int n_obs = 0;
    int dof = 0;

    std::size_t index(std::string_view name) const;
    double coef(std::string_view name) const { return coefficients(Eigen::Index(index(name))); }
    double stderr_of(std::string_view name) const { return stderrs(Eigen::Index(index(name))); }
    /// Two-sided Student-t p-value for H0: coefficient == value.
    double p_value_for(std::string_view name, double value) const;
    /// Two-sided confidence interval at the given coverage.
    std::pair<double, double> confidence_interval(std::string_view name, double coverage) const;
};

/// Least squares with classical standard errors and two-sided Student-t p-values.
/// R^2 is centered when the design holds a constant column, uncentered otherwise.
/// Throws RankError naming collinear columns, ValidationError when rows < columns + 1.
LinearFit ols(const Design& design, const Eigen::VectorXd& response);

}  // namespace assetsim
