#include "assetsim/dataio.hpp"

#include "assetsim/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace assetsim {

namespace {

std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(first, last - first + 1));
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
    if (text.empty()) return false;
    if constexpr (std::is_floating_point_v<T>) {
        char* end = nullptr;
        out = std::strtod(text.c_str(), &end);
        return end == text.c_str() + text.size() && std::isfinite(out);
    } else {
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
        return ec == std::errc() && ptr == text.data() + text.size();
    }
}

std::vector<std::pair<std::string, std::string>> read_two_columns(const std::filesystem::path& path,
                                                                  std::string_view expected_first) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path.string() + ": missing header row");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line = line.substr(3);
    const auto comma = line.find(',');
    if (comma == std::string::npos || trim(line.substr(0, comma)) != expected_first) {
        throw ValidationError(path.string() + ": expected header '" + std::string(expected_first) +
                              ",...'");
    }
    std::vector<std::pair<std::string, std::string>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto pos = line.find(',');
        if (pos == std::string::npos) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": expected two columns");
        }
        rows.emplace_back(trim(line.substr(0, pos)), trim(line.substr(pos + 1)));
    }
    return rows;
}

double checked_log(double x, const std::string& series, int year) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw ValidationError("non-positive argument to log in series '" + series + "' for year " +
                              std::to_string(year));
    }
    return std::log(x);
}

struct Coverage {
    const char* name;
    int first;
    int last;
};

// Ranges documented for the historical sources.
constexpr Coverage kDocumentedCoverage[] = {
    {"earnings", 1918, 2024},       {"dividends", 1928, 2024},      {"sp_close_eoy", 1927, 2024},
    {"baa_rate", 1927, 2024},       {"treasury_long", 1927, 2024},  {"treasury_short", 1927, 2024},
    {"bond_index", 1972, 2024},     {"eafe_return", 1970, 2024},    {"em_return", 1988, 2024},
};

void require_positive(const AnnualSeries& s) {
    for (int y = s.start_year(); y <= s.end_year(); ++y) {
        if (!(s.at(y) > 0.0)) {
            throw ValidationError("series '" + s.name() + "' must be positive; year " + std::to_string(y) +
                                  " has " + std::to_string(s.at(y)));
        }
    }
}

}  // namespace

Date parse_date(std::string_view text) {
    const std::string t = trim(text);
    Date d;
    if (t.size() != 10 || t[4] != '-' || t[7] != '-' || !parse_number(t.substr(0, 4), d.year) ||
        !parse_number(t.substr(5, 2), d.month) || !parse_number(t.substr(8, 2), d.day) || d.month < 1 ||
        d.month > 12 || d.day < 1 || d.day > 31) {
        throw ValidationError("invalid ISO date '" + t + "'");
    }
    return d;
}

std::string format_date(const Date& date) {
    std::ostringstream os;
    os << std::setfill('0') << std::setw(4) << date.year << '-' << std::setw(2) << date.month << '-'
       << std::setw(2) << date.day;
    return os.str();
}

VolatilityResult realized_volatility(const DailySeries& daily, std::optional<int> annualization_days) {
    for (const auto& obs : daily) {
        if (!(obs.close > 0.0)) {
            throw ValidationError("non-positive close " + std::to_string(obs.close) + " on " +
                                  format_date(obs.date));
        }
    }
    for (std::size_t i = 1; i < daily.size(); ++i) {
        if (!(daily[i - 1].date < daily[i].date)) {
            throw ValidationError("daily closes out of order at " + format_date(daily[i].date));
        }
    }
    const double scale = 100.0 * (annualization_days ? std::sqrt(double(*annualization_days)) : 1.0);

    std::map<int, std::vector<double>> changes;
    if (!daily.empty()) changes[daily.front().date.year];
    for (std::size_t i = 1; i < daily.size(); ++i) {
        changes[daily[i].date.year].push_back(std::log(daily[i].close / daily[i - 1].close));
    }

    VolatilityResult result;
    std::vector<double> values;
    int start = 0;
    for (const auto& [year, logs] : changes) {
        if (logs.size() < 2) {
            result.warnings.push_back("year " + std::to_string(year) + " has " + std::to_string(logs.size()) +
                                      " daily changes; volatility not computed");
            continue;
        }
        if (values.empty()) {
            start = year;
        } else if (year != start + static_cast<int>(values.size())) {
            throw ValidationError("daily series has a gap before year " + std::to_string(year));
        }
        double mean = 0.0;
        for (double x : logs) mean += x;
        mean /= double(logs.size());
        double ss = 0.0;
        for (double x : logs) ss += (x - mean) * (x - mean);
        values.push_back(std::sqrt(ss / double(logs.size() - 1)) * scale);
    }
    result.volatility = AnnualSeries("V", start, std::move(values), Units::Percent);
    return result;
}

AnnualSeries total_returns(const AnnualSeries& close, const AnnualSeries& dividends) {
    const AnnualSeries prev = close.lagged(1, "P_prev");
    const YearRange yr = common_years({&close, &prev, &dividends});
    std::vector<double> q;
    for (int y = yr.first; y <= yr.last; ++y) {
        const double p_prev = prev.at(y);
        if (!(p_prev > 0.0)) {
            throw ValidationError("division by zero in series 'Q' for year " + std::to_string(y));
        }
        q.push_back(checked_log((close.at(y) + dividends.at(y)) / p_prev, "Q", y));
    }
    return AnnualSeries("Q", yr.first, std::move(q), Units::LogReturn);
}

AnnualSeries log_growth(const AnnualSeries& level, std::string name) {
    if (level.size() < 2) throw ValidationError("series '" + level.name() + "' is too short for growth");
    std::vector<double> g;
    for (int y = level.start_year() + 1; y <= level.end_year(); ++y) {
        const double prev = level.at(y - 1);
        if (!(prev > 0.0)) {
            throw ValidationError("division by zero in series '" + name + "' for year " + std::to_string(y));
        }
        g.push_back(checked_log(level.at(y) / prev, name, y));
    }
    return AnnualSeries(std::move(name), level.start_year() + 1, std::move(g), Units::LogReturn);
}

AnnualSeries term_spread(const AnnualSeries& long_rate, const AnnualSeries& short_rate) {
    const YearRange yr = common_years({&long_rate, &short_rate});
    std::vector<double> s;
    for (int y = yr.first; y <= yr.last; ++y) s.push_back(long_rate.at(y) - short_rate.at(y));
    return AnnualSeries("S", yr.first, std::move(s), Units::Percent);
}

AnnualSeries international_returns(const AnnualSeries& eafe_percent, const AnnualSeries& em_percent,
                                   int blend_start_year, double eafe_weight) {
    std::vector<double> out;
    for (int y = eafe_percent.start_year(); y <= eafe_percent.end_year(); ++y) {
        double arithmetic = eafe_percent.at(y) / 100.0;
        if (y >= blend_start_year) {
            if (!em_percent.contains(y)) {
                throw ValidationError("series 'em_return' has no value for year " + std::to_string(y));
            }
            arithmetic = eafe_weight * arithmetic + (1.0 - eafe_weight) * em_percent.at(y) / 100.0;
        }
        out.push_back(checked_log(1.0 + arithmetic, "I", y));
    }
    return AnnualSeries("I", eafe_percent.start_year(), std::move(out), Units::LogReturn);
}

AnnualSeries trailing_average(const AnnualSeries& earnings, int window) {
    if (window < 1 || window > 10) throw ValidationError("averaging window must be in 1..10");
    if (earnings.size() < static_cast<std::size_t>(window)) {
        throw ValidationError("earnings history shorter than the averaging window");
    }
    const auto e = earnings.values();
    std::vector<double> avg;
    for (std::size_t i = static_cast<std::size_t>(window) - 1; i < e.size(); ++i) {
        double sum = 0.0;
        for (int s = 0; s < window; ++s) sum += e[i - static_cast<std::size_t>(s)];
        avg.push_back(sum / window);
    }
    return AnnualSeries("E_bar", earnings.start_year() + window - 1, std::move(avg), Units::IndexLevel);
}

std::vector<const AnnualSeries*> DerivedSeries::all() const {
    return {&V, &R, &S, &Q, &I, &B, &E, &G, &E_bar, &G_bar};
}

std::vector<std::string> validate_bundle(const RawBundle& b) {
    require_positive(b.earnings);
    require_positive(b.sp_close_eoy);
    require_positive(b.bond_index);
    require_positive(b.baa_rate);
    for (const auto& obs : b.daily_sp_close) {
        if (!(obs.close > 0.0)) {
            throw ValidationError("non-positive close on " + format_date(obs.date));
        }
    }
    const std::map<std::string, const AnnualSeries*> by_name = {
        {"earnings", &b.earnings},           {"dividends", &b.dividends},
        {"sp_close_eoy", &b.sp_close_eoy},   {"baa_rate", &b.baa_rate},
        {"treasury_long", &b.treasury_long}, {"treasury_short", &b.treasury_short},
        {"bond_index", &b.bond_index},       {"eafe_return", &b.eafe_return},
        {"em_return", &b.em_return},
    };
    std::vector<std::string> warnings;
    for (const auto& cov : kDocumentedCoverage) {
        const AnnualSeries* s = by_name.at(cov.name);
        if (s->empty()) {
            warnings.push_back(std::string(cov.name) + ": no data");
        } else if (s->start_year() > cov.first || s->end_year() < cov.last) {
            warnings.push_back(std::string(cov.name) + ": covers " + std::to_string(s->start_year()) + "-" +
                               std::to_string(s->end_year()) + ", documented " + std::to_string(cov.first) +
                               "-" + std::to_string(cov.last));
        }
    }
    if (b.daily_sp_close.empty()) {
        warnings.push_back("daily_sp_close: no data");
    } else if (b.daily_sp_close.front().date > Date{1927, 12, 30} || b.daily_sp_close.back().date.year < 2024) {
        warnings.push_back("daily_sp_close: covers " + format_date(b.daily_sp_close.front().date) + " to " +
                           format_date(b.daily_sp_close.back().date) + ", documented 1927-12-30 to 2024");
    }
    return warnings;
}

DerivedSeries derive_series(const RawBundle& bundle, const DeriveOptions& options) {
    if (options.window < 1 || options.window > 10) {
        throw ValidationError("averaging window must be in 1..10, got " + std::to_string(options.window));
    }
    DerivedSeries d;
    d.window = options.window;
    d.warnings = validate_bundle(bundle);

    auto vol = realized_volatility(bundle.daily_sp_close, options.volatility_annualization_days);
    d.warnings.insert(d.warnings.end(), vol.warnings.begin(), vol.warnings.end());
    d.V = std::move(vol.volatility);
    d.R = bundle.baa_rate.renamed("R");
    d.S = term_spread(bundle.treasury_long, bundle.treasury_short);
    d.Q = total_returns(bundle.sp_close_eoy, bundle.dividends);
    d.I = international_returns(bundle.eafe_return, bundle.em_return, options.blend_start_year,
                                options.eafe_weight);
    d.B = log_growth(bundle.bond_index, "B");
    d.E = bundle.earnings.renamed("E");
    d.G = log_growth(bundle.earnings, "G");
    d.E_bar = trailing_average(bundle.earnings, options.window);
    d.G_bar = log_growth(d.E_bar, "G_bar");
    return d;
}

DailySeries read_daily_csv(const std::filesystem::path& path) {
    DailySeries out;
    for (const auto& [date, value] : read_two_columns(path, "date")) {
        DailyClose obs;
        obs.date = parse_date(date);
        if (!parse_number(value, obs.close)) {
            throw ValidationError(path.string() + ": invalid close '" + value + "' on " + date);
        }
        out.push_back(obs);
    }
    return out;
}

AnnualSeries read_annual_csv(const std::filesystem::path& path, std::string name, Units units) {
    std::vector<std::pair<int, std::optional<double>>> rows;
    for (const auto& [year_text, value] : read_two_columns(path, "year")) {
        int year = 0;
        if (!parse_number(year_text, year)) {
            throw ValidationError(path.string() + ": invalid year '" + year_text + "'");
        }
        std::optional<double> v;
        if (!value.empty()) {
            double x = 0.0;
            if (!parse_number(value, x)) {
                throw ValidationError(path.string() + ": invalid value '" + value + "' for " + year_text);
            }
            v = x;
        }
        if (!rows.empty() && year != rows.back().first + 1) {
            throw ValidationError(path.string() + ": years must be consecutive, found " + year_text +
                                  " after " + std::to_string(rows.back().first));
        }
        rows.emplace_back(year, v);
    }
    std::size_t first = 0;
    std::size_t last = rows.size();
    while (first < last && !rows[first].second) ++first;
    while (last > first && !rows[last - 1].second) --last;
    std::vector<double> values;
    for (std::size_t i = first; i < last; ++i) {
        if (!rows[i].second) {
            throw ValidationError(path.string() + ": interior missing value for year " +
                                  std::to_string(rows[i].first));
        }
        values.push_back(*rows[i].second);
    }
    const int start = first < last ? rows[first].first : 0;
    return AnnualSeries(std::move(name), start, std::move(values), units);
}

void write_annual_csv(const std::filesystem::path& path, const AnnualSeries& series) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "year,value\n" << std::setprecision(17);
    for (int y = series.start_year(); y <= series.end_year(); ++y) out << y << ',' << series.at(y) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

void write_daily_csv(const std::filesystem::path& path, const DailySeries& daily) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "date,close\n" << std::setprecision(12);
    for (const auto& obs : daily) out << format_date(obs.date) << ',' << obs.close << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("manifest " + path.string() + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("series") || !doc.at("series").is_object()) {
        throw ValidationError("manifest " + path.string() + ": missing 'series' object");
    }
    const auto dir = path.parent_path();
    const auto& series = doc.at("series");
    auto file = [&](const char* key) {
        if (!series.contains(key)) throw ValidationError("manifest is missing series '" + std::string(key) + "'");
        return dir / series.at(key).get<std::string>();
    };

    Manifest m;
    m.bundle.daily_sp_close = read_daily_csv(file("daily_sp_close"));
    m.bundle.earnings = read_annual_csv(file("earnings"), "earnings", Units::IndexLevel);
    m.bundle.dividends = read_annual_csv(file("dividends"), "dividends", Units::IndexLevel);
    m.bundle.sp_close_eoy = read_annual_csv(file("sp_close_eoy"), "sp_close_eoy", Units::IndexLevel);
    m.bundle.baa_rate = read_annual_csv(file("baa_rate"), "baa_rate", Units::Percent);
    m.bundle.treasury_long = read_annual_csv(file("treasury_long"), "treasury_long", Units::Percent);
    m.bundle.treasury_short = read_annual_csv(file("treasury_short"), "treasury_short", Units::Percent);
    m.bundle.bond_index = read_annual_csv(file("bond_index"), "bond_index", Units::IndexLevel);
    m.bundle.eafe_return = read_annual_csv(file("eafe_return"), "eafe_return", Units::Percent);
    m.bundle.em_return = read_annual_csv(file("em_return"), "em_return", Units::Percent);

    if (doc.contains("options")) try {
        const auto& o = doc.at("options");
        m.options.window = o.value("averaging_window", m.options.window);
        if (o.contains("volatility_annualization_days") && !o.at("volatility_annualization_days").is_null()) {
            m.options.volatility_annualization_days = o.at("volatility_annualization_days").get<int>();
        }
        m.options.blend_start_year = o.value("blend_start_year", m.options.blend_start_year);
        m.options.eafe_weight = o.value("eafe_weight", m.options.eafe_weight);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("manifest options: " + std::string(e.what()));
    }
    return m;
}

}  // namespace assetsim
