#pragma once

#include "assetsim/series.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace assetsim {

struct Date {
    int year = 0;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;
};

/// Parses YYYY-MM-DD.
Date parse_date(std::string_view text);
std::string format_date(const Date& date);

struct DailyClose {
    Date date;
    double close = 0.0;
};
using DailySeries = std::vector<DailyClose>;

/// Raw inputs as published. International returns are arithmetic percent.
struct RawBundle {
    DailySeries daily_sp_close;
    AnnualSeries earnings;
    AnnualSeries dividends;
    AnnualSeries sp_close_eoy;
    AnnualSeries baa_rate;
    AnnualSeries treasury_long;
    AnnualSeries treasury_short;
    AnnualSeries bond_index;
    AnnualSeries eafe_return;
    AnnualSeries em_return;
};

struct DeriveOptions {
    int window = 10;
    /// Multiply the daily standard deviation by sqrt(days) when set.
    std::optional<int> volatility_annualization_days;
    int blend_start_year = 1988;
    double eafe_weight = 0.6;
};

struct VolatilityResult {
    AnnualSeries volatility;
    std::vector<std::string> warnings;
};

/// Per calendar year, the sample standard deviation of daily log changes in percent.
/// A change belongs to the year of its closing date. Years with fewer than two
/// changes are skipped with a warning; a non-positive close is rejected.
VolatilityResult realized_volatility(const DailySeries& daily,
                                     std::optional<int> annualization_days = std::nullopt);

/// Q(t) = ln((P(t) + D(t)) / P(t-1)).
AnnualSeries total_returns(const AnnualSeries& close, const AnnualSeries& dividends);
/// ln(U(t) / U(t-1)).
AnnualSeries log_growth(const AnnualSeries& level, std::string name);
AnnualSeries term_spread(const AnnualSeries& long_rate, const AnnualSeries& short_rate);
/// EAFE alone before blend_start_year, then an arithmetic blend with EM, converted to log.
AnnualSeries international_returns(const AnnualSeries& eafe_percent, const AnnualSeries& em_percent,
                                   int blend_start_year = 1988, double eafe_weight = 0.6);
/// Mean of E(t), ..., E(t - L + 1); starts L - 1 years after E.
AnnualSeries trailing_average(const AnnualSeries& earnings, int window);

struct DerivedSeries {
    int window = 10;
    AnnualSeries V, R, S, Q, I, B, E, G, E_bar, G_bar;
    std::vector<std::string> warnings;

    std::vector<const AnnualSeries*> all() const;
};

DerivedSeries derive_series(const RawBundle& bundle, const DeriveOptions& options = {});

/// Checks positivity of levels, rates and earnings. Returns coverage warnings for
/// series shorter than the documented historical ranges.
std::vector<std::string> validate_bundle(const RawBundle& bundle);

DailySeries read_daily_csv(const std::filesystem::path& path);
/// Blank leading/trailing values are trimmed; interior gaps are rejected.
AnnualSeries read_annual_csv(const std::filesystem::path& path, std::string name, Units units);
void write_annual_csv(const std::filesystem::path& path, const AnnualSeries& series);
void write_daily_csv(const std::filesystem::path& path, const DailySeries& daily);

struct Manifest {
    RawBundle bundle;
    DeriveOptions options;
};

/// JSON manifest: {"series": {name: path, ...}, "options": {...}}; paths are relative
/// to the manifest's directory.
Manifest load_manifest(const std::filesystem::path& path);

}  // namespace assetsim
