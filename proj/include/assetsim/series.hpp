#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace assetsim {

enum class Units { LogReturn, Percent, IndexLevel, Dimensionless };

std::string_view to_string(Units units);
Units units_from_string(std::string_view text);

/// Contiguous year-indexed series: values[i] belongs to start_year + i.
class AnnualSeries {
public:
    AnnualSeries() = default;
    AnnualSeries(std::string name, int start_year, std::vector<double> values,
                 Units units = Units::Dimensionless);

    const std::string& name() const noexcept { return name_; }
    int start_year() const noexcept { return start_year_; }
    int end_year() const noexcept { return start_year_ + static_cast<int>(values_.size()) - 1; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    Units units() const noexcept { return units_; }
    std::span<const double> values() const noexcept { return values_; }

    bool contains(int year) const noexcept {
        return !values_.empty() && year >= start_year_ && year <= end_year();
    }
    /// Throws ValidationError naming the series and year when out of range.
    double at(int year) const;

    /// Restriction to [first, last]; both must lie inside the series.
    AnnualSeries slice(int first, int last) const;
    /// x(t - k) re-indexed at year t.
    AnnualSeries lagged(int k, std::string name) const;
    /// x(t) - x(t - 1), starting one year later.
    AnnualSeries diff(std::string name) const;
    AnnualSeries transformed(const std::function<double(double)>& fn, std::string name,
                             Units units) const;
    AnnualSeries renamed(std::string name) const;

private:
    std::string name_;
    int start_year_ = 0;
    std::vector<double> values_;
    Units units_ = Units::Dimensionless;
};

struct YearRange {
    int first = 0;
    int last = -1;
    int count() const noexcept { return last - first + 1; }
};

/// Years covered by every series. Throws ValidationError when the overlap is empty.
YearRange common_years(std::span<const AnnualSeries* const> series);
YearRange common_years(std::initializer_list<const AnnualSeries*> series);

}  // namespace assetsim
