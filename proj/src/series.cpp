#include "assetsim/series.hpp"

#include "assetsim/errors.hpp"

#include <algorithm>

namespace assetsim {

std::string_view to_string(Units units) {
    switch (units) {
        case Units::LogReturn: return "log-return";
        case Units::Percent: return "percent";
        case Units::IndexLevel: return "index-level";
        case Units::Dimensionless: return "dimensionless";
    }
    return "dimensionless";
}

Units units_from_string(std::string_view text) {
    if (text == "log-return") return Units::LogReturn;
    if (text == "percent") return Units::Percent;
    if (text == "index-level") return Units::IndexLevel;
    if (text == "dimensionless") return Units::Dimensionless;
    throw ValidationError("unknown units tag '" + std::string(text) + "'");
}

AnnualSeries::AnnualSeries(std::string name, int start_year, std::vector<double> values, Units units)
    : name_(std::move(name)), start_year_(start_year), values_(std::move(values)), units_(units) {}

double AnnualSeries::at(int year) const {
    if (!contains(year)) {
        throw ValidationError("series '" + name_ + "' has no value for year " + std::to_string(year));
    }
    return values_[static_cast<std::size_t>(year - start_year_)];
}

AnnualSeries AnnualSeries::slice(int first, int last) const {
    if (first > last || !contains(first) || !contains(last)) {
        throw ValidationError("series '" + name_ + "' does not cover " + std::to_string(first) + "-" +
                              std::to_string(last));
    }
    auto begin = values_.begin() + (first - start_year_);
    auto end = values_.begin() + (last - start_year_ + 1);
    return AnnualSeries(name_, first, std::vector<double>(begin, end), units_);
}

AnnualSeries AnnualSeries::lagged(int k, std::string name) const {
    return AnnualSeries(std::move(name), start_year_ + k, values_, units_);
}

AnnualSeries AnnualSeries::diff(std::string name) const {
    if (values_.size() < 2) {
        throw ValidationError("series '" + name_ + "' is too short to difference");
    }
    std::vector<double> out(values_.size() - 1);
    for (std::size_t i = 1; i < values_.size(); ++i) out[i - 1] = values_[i] - values_[i - 1];
    return AnnualSeries(std::move(name), start_year_ + 1, std::move(out), units_);
}

AnnualSeries AnnualSeries::transformed(const std::function<double(double)>& fn, std::string name,
                                       Units units) const {
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(), fn);
    return AnnualSeries(std::move(name), start_year_, std::move(out), units);
}

AnnualSeries AnnualSeries::renamed(std::string name) const {
    return AnnualSeries(std::move(name), start_year_, values_, units_);
}

YearRange common_years(std::span<const AnnualSeries* const> series) {
    YearRange range{-1000000, 1000000};
    std::string names;
    for (const AnnualSeries* s : series) {
        if (s->empty()) throw ValidationError("series '" + s->name() + "' is empty");
        range.first = std::max(range.first, s->start_year());
        range.last = std::min(range.last, s->end_year());
        if (!names.empty()) names += ", ";
        names += s->name();
    }
    if (series.empty() || range.first > range.last) {
        throw ValidationError("series have no overlapping years: " + names);
    }
    return range;
}

YearRange common_years(std::initializer_list<const AnnualSeries*> series) {
    return common_years(std::span<const AnnualSeries* const>(series.begin(), series.size()));
}

}  // namespace assetsim
