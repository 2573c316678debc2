#include "assetsim/synthetic.hpp"

#include "assetsim/engine.hpp"
#include "assetsim/errors.hpp"
#include "assetsim/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

namespace assetsim {

namespace {

constexpr double kInitialClose = 17.66;
constexpr double kBondIndexBase = 100.0;
constexpr double kCreditSpread = 1.0;
constexpr double kMinShortRate = 0.05;
constexpr double kTradingDays = 252.0;

std::vector<Date> weekdays(int year) {
    using namespace std::chrono;
    std::vector<Date> out;
    for (sys_days d = sys_days{std::chrono::year{year} / January / 1}; d <= sys_days{std::chrono::year{year} / December / 31};
         d += days{1}) {
        const weekday wd{d};
        if (wd == Saturday || wd == Sunday) continue;
        const year_month_day ymd{d};
        out.push_back({int(ymd.year()), int(unsigned(ymd.month())), int(unsigned(ymd.day()))});
    }
    return out;
}

AnnualSeries make(std::string name, int start, std::vector<double> v, Units u) {
    return AnnualSeries(std::move(name), start, std::move(v), u);
}

}  // namespace

InnovationRows gaussian_innovations(int rows, const Eigen::MatrixXd& correlation,
                                    const std::array<double, kNoiseDim>& stdev, std::uint64_t seed) {
    const Eigen::LLT<Eigen::MatrixXd> llt(correlation);
    if (llt.info() != Eigen::Success) throw ValidationError("innovation correlation is not positive definite");
    const Eigen::MatrixXd L = llt.matrixL();
    Rng rng(seed, 0);
    InnovationRows out(rows, Eigen::Index(kNoiseDim));
    Eigen::VectorXd z(static_cast<Eigen::Index>(kNoiseDim));
    for (int r = 0; r < rows; ++r) {
        for (auto& v : z) v = rng.normal();
        const Eigen::VectorXd x = L * z;
        for (std::size_t c = 0; c < kNoiseDim; ++c) out(r, Eigen::Index(c)) = x(Eigen::Index(c)) * stdev[c];
    }
    return out;
}

SyntheticHistory simulate_history(const ModelSpec& model, const InnovationRows& innovations,
                                  const SyntheticOptions& o) {
    const int years = int(innovations.rows());
    const int L = model.valuation.window;
    if (years < 2) throw ValidationError("synthetic history needs at least two innovation rows");
    if (o.burn_in < L) throw ValidationError("burn-in must cover the earnings window");

    // Pre-sample: start from the AR(1) means and a flat earnings window.
    FactorState state;
    state.V = std::exp(model.vol.intercept / (1.0 - model.vol.slope));
    state.R = std::exp(model.rate.intercept / (1.0 - model.rate.slope));
    state.S = model.spread.intercept / (1.0 - model.spread.slope);
    state.H = 0.0;
    state.earnings.assign(std::size_t(L), 1.0);
    state.year = o.first_year - 1 - o.burn_in;

    const KdeSampler sampler(model.filled, model.bandwidths);
    Rng burn_rng(o.seed, 1);
    std::vector<double> E;
    for (int k = 0; k < o.burn_in; ++k) {
        StepOutput out = step(model, state, sampler.sample(burn_rng));
        state = std::move(out.state);
        E.push_back(state.earnings.back());
    }
    state.H = 0.0;

    const int first = o.first_year;
    const int last = first + years - 1;
    std::vector<double> V{state.V}, R{state.R}, S{state.S}, H{0.0};
    std::vector<double> Q, I, B, G;
    for (int r = 0; r < years; ++r) {
        NoiseDraw z;
        for (std::size_t c = 0; c < kNoiseDim; ++c) z[c] = innovations(r, Eigen::Index(c));
        StepOutput out = step(model, state, z);
        state = std::move(out.state);
        V.push_back(state.V);
        R.push_back(state.R);
        S.push_back(state.S);
        H.push_back(state.H);
        E.push_back(state.earnings.back());
        Q.push_back(out.Q);
        I.push_back(out.I);
        B.push_back(out.B);
        G.push_back(out.G);
    }

    SyntheticHistory h;
    h.first_year = first;
    h.innovations = innovations;
    h.V = make("V", first - 1, V, Units::Percent);
    h.R = make("R", first - 1, R, Units::Percent);
    h.S = make("S", first - 1, S, Units::Percent);
    h.H = make("H", first - 1, H, Units::Dimensionless);
    h.E = make("E", first - o.burn_in, E, Units::IndexLevel);
    h.Q = make("Q", first, Q, Units::LogReturn);
    h.I = make("I", first, I, Units::LogReturn);
    h.B = make("B", first, B, Units::LogReturn);
    h.G = make("G", first, G, Units::LogReturn);

    RawBundle& bundle = h.bundle;
    std::vector<double> close{kInitialClose}, dividends;
    for (int t = first; t <= last; ++t) {
        const double prev = close.back();
        const double yield = 0.05 - 0.03 * double(t - first) / double(std::max(1, last - first));
        const double gross = prev * std::exp(h.Q.at(t));
        double d = yield * prev;
        if (d >= 0.5 * gross) d = 0.25 * gross;
        dividends.push_back(d);
        close.push_back(gross - d);
    }
    bundle.sp_close_eoy = make("sp_close_eoy", first - 1, close, Units::IndexLevel);
    bundle.dividends = make("dividends", first, dividends, Units::IndexLevel);
    bundle.earnings = h.E.renamed("earnings");

    bundle.daily_sp_close.push_back({{first - 1, 12, 30}, kInitialClose});
    for (int t = first; t <= last; ++t) {
        const auto dates = weekdays(t);
        const auto n = dates.size();
        Rng rng(o.seed, 1000 + std::uint64_t(t));
        std::vector<double> x(n);
        for (auto& v : x) v = rng.normal();
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= double(n);
        double ss = 0.0;
        for (double v : x) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / double(n - 1));
        const double sigma = h.V.at(t) / 100.0 / std::sqrt(kTradingDays);
        const double p0 = bundle.sp_close_eoy.at(t - 1);
        const double p1 = bundle.sp_close_eoy.at(t);
        const double mu = std::log(p1 / p0) / double(n);
        double level = std::log(p0);
        for (std::size_t k = 0; k < n; ++k) {
            level += mu + sigma * (x[k] - mean) / sd;
            bundle.daily_sp_close.push_back({dates[k], k + 1 == n ? p1 : std::exp(level)});
        }
    }

    std::vector<double> baa, lng, shrt;
    for (int t = first - 1; t <= last; ++t) {
        const double r = h.R.at(t);
        const double s = h.S.at(t);
        const double short_rate = std::max({r - kCreditSpread - s, kMinShortRate, kMinShortRate - s});
        baa.push_back(r);
        shrt.push_back(short_rate);
        lng.push_back(short_rate + s);
    }
    bundle.baa_rate = make("baa_rate", first - 1, baa, Units::Percent);
    bundle.treasury_long = make("treasury_long", first - 1, lng, Units::Percent);
    bundle.treasury_short = make("treasury_short", first - 1, shrt, Units::Percent);

    std::vector<double> index{kBondIndexBase};
    for (int t = o.bond_index_start_year + 1; t <= last; ++t) index.push_back(index.back() * std::exp(h.B.at(t)));
    bundle.bond_index = make("bond_index", o.bond_index_start_year, index, Units::IndexLevel);

    Rng em_rng(o.seed, 2);
    std::vector<double> eafe, em;
    for (int t = o.intl_start_year; t <= last; ++t) {
        const double a = std::expm1(h.I.at(t));
        if (t < o.blend_start_year) {
            eafe.push_back(100.0 * a);
            continue;
        }
        double m = a + 0.1 * em_rng.normal();
        double e = (a - (1.0 - o.eafe_weight) * m) / o.eafe_weight;
        if (m <= -0.95 || e <= -0.95) m = e = a;
        eafe.push_back(100.0 * e);
        em.push_back(100.0 * m);
    }
    bundle.eafe_return = make("eafe_return", o.intl_start_year, eafe, Units::Percent);
    bundle.em_return = make("em_return", o.blend_start_year, em, Units::Percent);
    return h;
}

void write_bundle(const std::filesystem::path& dir, const RawBundle& b) {
    std::filesystem::create_directories(dir);
    write_daily_csv(dir / "daily_sp_close.csv", b.daily_sp_close);
    const std::pair<const char*, const AnnualSeries*> annual[] = {
        {"earnings", &b.earnings},         {"dividends", &b.dividends},
        {"sp_close_eoy", &b.sp_close_eoy}, {"baa_rate", &b.baa_rate},
        {"treasury_long", &b.treasury_long}, {"treasury_short", &b.treasury_short},
        {"bond_index", &b.bond_index},     {"eafe_return", &b.eafe_return},
        {"em_return", &b.em_return}};
    nlohmann::ordered_json manifest;
    manifest["series"]["daily_sp_close"] = "daily_sp_close.csv";
    for (const auto& [name, series] : annual) {
        const std::string file = std::string(name) + ".csv";
        write_annual_csv(dir / file, *series);
        manifest["series"][name] = file;
    }
    manifest["options"] = {{"averaging_window", 10},
                           {"volatility_annualization_days", 252},
                           {"blend_start_year", 1988},
                           {"eafe_weight", 0.6}};
    std::ofstream out(dir / "manifest.json");
    if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
    out << manifest.dump(2) << '\n';
}

}  // namespace assetsim
