#include "assetsim/diagnostics.hpp"

#include "assetsim/errors.hpp"
#include "assetsim/rng.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

namespace assetsim {

namespace {

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
}

double central_moment(std::span<const double> x, double mean, int k) {
    double s = 0.0;
    for (double v : x) s += std::pow(v - mean, k);
    return s / double(x.size());
}

bool is_constant(std::span<const double> x) {
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    const double scale = std::max(std::abs(*lo), std::abs(*hi));
    return *hi - *lo <= 1e-12 * scale;
}

double poly(std::span<const double> c, double x) {
    double r = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
    return r;
}

double ceil_rank_quantile(std::vector<double> values, double level) {
    std::sort(values.begin(), values.end());
    auto rank = static_cast<std::size_t>(std::ceil(level * double(values.size())));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

std::string fmt_opt(const std::optional<double>& v, int precision) {
    if (!v) return "n/a";
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << *v;
    return os.str();
}

}  // namespace

Moments moment_stats(std::span<const double> x) {
    if (x.size() < 3) throw ValidationError("skewness/kurtosis need at least 3 observations");
    const double m = mean_of(x);
    const double m2 = central_moment(x, m, 2);
    if (!(m2 > 0.0) || is_constant(x)) {
        throw ValidationError("skewness/kurtosis undefined: zero variance");
    }
    const double m3 = central_moment(x, m, 3);
    const double m4 = central_moment(x, m, 4);
    return {m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

std::vector<double> autocorrelation(std::span<const double> x, int max_lag) {
    const std::size_t n = x.size();
    if (max_lag < 0 || n <= static_cast<std::size_t>(max_lag)) {
        throw ValidationError("autocorrelation: series length must exceed max_lag");
    }
    const double m = mean_of(x);
    double var = 0.0;
    for (double v : x) var += (v - m) * (v - m);
    if (!(var > 0.0) || is_constant(x)) throw ValidationError("autocorrelation undefined: zero variance");
    std::vector<double> rho(static_cast<std::size_t>(max_lag) + 1);
    for (int k = 0; k <= max_lag; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j + k < n; ++j) s += (x[j] - m) * (x[j + k] - m);
        rho[static_cast<std::size_t>(k)] = s / var;
    }
    return rho;
}

AcfNorms acf_l1(std::span<const double> x, int max_lag) {
    auto l1 = [max_lag](std::span<const double> v) {
        const auto rho = autocorrelation(v, max_lag);
        double s = 0.0;
        for (std::size_t k = 1; k < rho.size(); ++k) s += std::abs(rho[k]);
        return s;
    };
    AcfNorms out;
    out.l1_original = l1(x);
    std::vector<double> a(x.size());
    std::transform(x.begin(), x.end(), a.begin(), [](double v) { return std::abs(v); });
    if (!is_constant(a)) out.l1_absolute = l1(a);
    return out;
}

JarqueBera jarque_bera(std::size_t n, const Moments& m) {
    JarqueBera jb;
    jb.statistic = double(n) / 6.0 * (m.skew * m.skew + m.kurt * m.kurt / 4.0);
    jb.p_value = std::exp(-jb.statistic / 2.0);
    return jb;
}

JarqueBera jarque_bera(std::span<const double> x) { return jarque_bera(x.size(), moment_stats(x)); }

ShapiroWilk shapiro_wilk(std::span<const double> data) {
    const std::size_t n = data.size();
    if (n < 3 || n > 5000) throw ValidationError("Shapiro-Wilk requires 3 <= N <= 5000");
    std::vector<double> x(data.begin(), data.end());
    std::sort(x.begin(), x.end());
    if (is_constant(x)) throw ValidationError("Shapiro-Wilk undefined: zero variance");

    static constexpr double kG[] = {-2.273, 0.459};
    static constexpr double kC1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
    static constexpr double kC2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
    static constexpr double kC3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
    static constexpr double kC4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
    static constexpr double kC5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
    static constexpr double kC6[] = {-0.4803, -0.082676, 0.0030302};

    const boost::math::normal_distribution<double> std_normal;
    const double an = double(n);
    const std::size_t half = n / 2;

    // a[i] is the coefficient of the i-th smallest order statistic (negated) and of
    // the i-th largest; the middle one is zero for odd n.
    std::vector<double> a(half + 1);
    if (n == 3) {
        a[1] = std::sqrt(0.5);
    } else {
        std::vector<double> m(half + 1);
        double summ2 = 0.0;
        for (std::size_t i = 1; i <= half; ++i) {
            m[i] = boost::math::quantile(std_normal, (double(i) - 0.375) / (an + 0.25));
            summ2 += m[i] * m[i];
        }
        summ2 *= 2.0;
        const double ssumm2 = std::sqrt(summ2);
        const double rsn = 1.0 / std::sqrt(an);
        const double a1 = poly(kC1, rsn) - m[1] / ssumm2;
        std::size_t first_scaled = 2;
        double fac = 0.0;
        if (n > 5) {
            first_scaled = 3;
            const double a2 = -m[2] / ssumm2 + poly(kC2, rsn);
            fac = std::sqrt((summ2 - 2.0 * m[1] * m[1] - 2.0 * m[2] * m[2]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
            a[2] = a2;
        } else {
            fac = std::sqrt((summ2 - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1));
        }
        a[1] = a1;
        for (std::size_t i = first_scaled; i <= half; ++i) a[i] = -m[i] / fac;
    }

    const double mean = mean_of(x);
    double ssq = 0.0;
    for (double v : x) ssq += (v - mean) * (v - mean);
    double num = 0.0;
    for (std::size_t i = 1; i <= half; ++i) num += a[i] * (x[n - i] - x[i - 1]);
    double w = num * num / ssq;
    w = std::min(w, 1.0);

    ShapiroWilk out;
    out.w = w;
    if (n == 3) {
        constexpr double kPi6 = 1.90985931710274;   // 6 / pi
        constexpr double kStqr = 1.04719755119660;  // pi / 3
        out.p_value = std::max(0.0, kPi6 * (std::asin(std::sqrt(w)) - kStqr));
        return out;
    }
    const double w1 = 1.0 - w;
    if (!(w1 > 0.0)) {
        out.p_value = 1.0;
        return out;
    }
    double y = std::log(w1);
    double mu = 0.0;
    double sigma = 0.0;
    if (n <= 11) {
        const double gamma = poly(kG, an);
        if (y >= gamma) {
            out.p_value = 1e-99;
            return out;
        }
        y = -std::log(gamma - y);
        mu = poly(kC3, an);
        sigma = std::exp(poly(kC4, an));
    } else {
        const double xx = std::log(an);
        mu = poly(kC5, xx);
        sigma = std::exp(poly(kC6, xx));
    }
    out.p_value = boost::math::cdf(boost::math::complement(std_normal, (y - mu) / sigma));
    return out;
}

NormalityTests normality_tests(std::span<const double> x) {
    NormalityTests out;
    out.jb_p = jarque_bera(x).p_value;
    if (x.size() >= 8 && x.size() <= 5000) out.sw_p = shapiro_wilk(x).p_value;
    return out;
}

DiagnosticsReport diagnose(std::string name, std::span<const double> x, int max_lag) {
    DiagnosticsReport r;
    r.name = std::move(name);
    r.n = x.size();
    const double m = mean_of(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    r.stdev = std::sqrt(ss / double(x.size() - 1));
    const Moments mom = moment_stats(x);
    r.skew = mom.skew;
    r.kurt = mom.kurt;
    if (x.size() >= 8) {
        const NormalityTests nt = normality_tests(x);
        r.sw_p = nt.sw_p;
        r.jb_p = nt.jb_p;
    } else {
        r.jb_p = jarque_bera(x.size(), mom).p_value;
    }
    const AcfNorms acf = acf_l1(x, max_lag);
    r.l1_original = acf.l1_original;
    r.l1_absolute = acf.l1_absolute;
    return r;
}

void write_reports_text(std::ostream& os, const std::vector<DiagnosticsReport>& reports) {
    os << std::left << std::setw(8) << "Reg" << std::right << std::setw(6) << "Size" << std::setw(10) << "Stdev"
       << std::setw(9) << "Skew" << std::setw(9) << "Kurt" << std::setw(8) << "SW" << std::setw(8) << "JB"
       << std::setw(8) << "L1O" << std::setw(8) << "L1A" << '\n';
    for (const auto& r : reports) {
        os << std::left << std::setw(8) << r.name << std::right << std::setw(6) << r.n << std::fixed
           << std::setprecision(4) << std::setw(10) << r.stdev << std::setprecision(3) << std::setw(9) << r.skew
           << std::setw(9) << r.kurt << std::setw(8) << fmt_opt(r.sw_p, 3) << std::setw(8) << r.jb_p
           << std::setw(8) << r.l1_original << std::setw(8) << fmt_opt(r.l1_absolute, 3) << '\n';
    }
    os.unsetf(std::ios::floatfield);
}

void write_reports_csv(std::ostream& os, const std::vector<DiagnosticsReport>& reports) {
    os << "series,size,stdev,skew,kurt,sw_p,jb_p,l1_original,l1_absolute\n" << std::setprecision(10);
    for (const auto& r : reports) {
        os << r.name << ',' << r.n << ',' << r.stdev << ',' << r.skew << ',' << r.kurt << ','
           << (r.sw_p ? std::to_string(*r.sw_p) : "") << ',' << r.jb_p << ',' << r.l1_original << ','
           << (r.l1_absolute ? std::to_string(*r.l1_absolute) : "") << '\n';
    }
}

std::vector<CriticalValueTable> mc_critical_values(int n, std::span<const double> levels, int replications,
                                                   std::uint64_t seed, int workers) {
    if (n < 10) throw ValidationError("critical values need n >= 10");
    if (replications < 100) throw ValidationError("critical values need at least 100 replications");
    for (double level : levels) {
        if (!(level > 0.0 && level < 1.0)) throw ValidationError("level must lie in (0, 1)");
    }
    const auto reps = static_cast<std::size_t>(replications);
    std::vector<double> skew(reps), kurt(reps), l1(reps);

    auto run_range = [&](std::size_t begin, std::size_t end) {
        std::vector<double> sample(static_cast<std::size_t>(n));
        for (std::size_t r = begin; r < end; ++r) {
            Rng rng(seed, r);
            for (auto& v : sample) v = rng.normal();
            const Moments m = moment_stats(sample);
            skew[r] = std::abs(m.skew);
            kurt[r] = m.kurt;
            l1[r] = acf_l1(sample, 5).l1_original;
        }
    };
    workers = std::max(1, workers);
    if (workers == 1) {
        run_range(0, reps);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (reps + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const std::size_t begin = std::min(reps, chunk * w);
            const std::size_t end = std::min(reps, begin + chunk);
            pool.emplace_back(run_range, begin, end);
        }
    }

    std::vector<CriticalValueTable> out;
    for (double level : levels) {
        CriticalValueTable t;
        t.n = n;
        t.level = level;
        t.replications = replications;
        t.skew_crit = ceil_rank_quantile(skew, level);
        t.kurt_crit = ceil_rank_quantile(kurt, level);
        t.l1_crit = ceil_rank_quantile(l1, level);
        out.push_back(t);
    }
    return out;
}

CriticalValueTable mc_critical_values(int n, double level, int replications, std::uint64_t seed, int workers) {
    const double levels[] = {level};
    return mc_critical_values(n, levels, replications, seed, workers).front();
}

void write_critical_values_text(std::ostream& os, const std::vector<CriticalValueTable>& rows) {
    os << std::setw(6) << "Size" << std::setw(8) << "p" << std::setw(8) << "Skew" << std::setw(8) << "Kurt"
       << std::setw(8) << "L1" << std::setw(10) << "Reps" << '\n';
    for (const auto& r : rows) {
        os << std::setw(6) << r.n << std::setw(7) << std::fixed << std::setprecision(1) << r.level * 100 << '%'
           << std::setprecision(2) << std::setw(8) << r.skew_crit << std::setw(8) << r.kurt_crit << std::setw(8)
           << r.l1_crit << std::setw(10) << r.replications << '\n';
    }
    os.unsetf(std::ios::floatfield);
}

void write_critical_values_csv(std::ostream& os, const std::vector<CriticalValueTable>& rows) {
    os << "n,level,skew,kurt,l1,replications\n" << std::setprecision(10);
    for (const auto& r : rows) {
        os << r.n << ',' << r.level << ',' << r.skew_crit << ',' << r.kurt_crit << ',' << r.l1_crit << ','
           << r.replications << '\n';
    }
}

}  // namespace assetsim
