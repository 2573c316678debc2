#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace assetsim {

/// Population-moment (divisor N) skewness and excess kurtosis.
struct Moments {
    double skew = 0.0;
    double kurt = 0.0;
};

Moments moment_stats(std::span<const double> x);

/// rho(0..max_lag) with the divisor-N autocovariance normalized by the divisor-N variance.
std::vector<double> autocorrelation(std::span<const double> x, int max_lag);

struct AcfNorms {
    double l1_original = 0.0;
    /// Empty when |x| is constant (alternating +/-c and similar).
    std::optional<double> l1_absolute;
};

/// Sum of |rho(k)| for k = 1..max_lag, for x and for |x|.
AcfNorms acf_l1(std::span<const double> x, int max_lag = 5);

struct JarqueBera {
    double statistic = 0.0;
    double p_value = 1.0;
};
JarqueBera jarque_bera(std::span<const double> x);
/// Chi-square(2) upper tail of N/6 (skew^2 + kurt^2/4).
JarqueBera jarque_bera(std::size_t n, const Moments& m);

struct ShapiroWilk {
    double w = 1.0;
    double p_value = 1.0;
};
/// Royston's AS R94 algorithm; requires 3 <= N <= 5000.
ShapiroWilk shapiro_wilk(std::span<const double> x);

struct NormalityTests {
    std::optional<double> sw_p;  ///< present for 8 <= N <= 5000
    double jb_p = 1.0;
};
NormalityTests normality_tests(std::span<const double> x);

struct DiagnosticsReport {
    std::string name;
    std::size_t n = 0;
    double stdev = 0.0;
    double skew = 0.0;
    double kurt = 0.0;
    std::optional<double> sw_p;
    double jb_p = 1.0;
    double l1_original = 0.0;
    std::optional<double> l1_absolute;
};

/// Full white-noise report: stdev (divisor N - 1), moments, normality p-values, ACF L1 norms.
DiagnosticsReport diagnose(std::string name, std::span<const double> x, int max_lag = 5);

void write_reports_text(std::ostream& os, const std::vector<DiagnosticsReport>& reports);
void write_reports_csv(std::ostream& os, const std::vector<DiagnosticsReport>& reports);

struct CriticalValueTable {
    int n = 0;
    double level = 0.95;
    double skew_crit = 0.0;  ///< quantile of |skew|
    double kurt_crit = 0.0;  ///< upper quantile of excess kurtosis
    double l1_crit = 0.0;    ///< quantile of the lag 1..5 ACF L1 norm
    int replications = 0;
};

/// Monte Carlo critical values under IID Gaussian samples of size n. Replication r
/// draws from stream (seed, r), so the result does not depend on `workers`.
/// One table per requested level, all from the same replications.
std::vector<CriticalValueTable> mc_critical_values(int n, std::span<const double> levels, int replications,
                                                   std::uint64_t seed, int workers = 1);
CriticalValueTable mc_critical_values(int n, double level, int replications, std::uint64_t seed,
                                      int workers = 1);

void write_critical_values_text(std::ostream& os, const std::vector<CriticalValueTable>& rows);
void write_critical_values_csv(std::ostream& os, const std::vector<CriticalValueTable>& rows);

}  // namespace assetsim
