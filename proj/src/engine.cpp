#include "assetsim/engine.hpp"

#include "assetsim/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace assetsim {

namespace {

constexpr double kRescaleHigh = 1e150;
constexpr double kRescaleLow = 1e-150;

void check_finite(double value, const char* name, int year) {
    if (!std::isfinite(value)) {
        throw ValidationError(std::string("non-finite ") + name + " in simulated year " + std::to_string(year));
    }
}

double window_mean(const std::vector<double>& w) { return std::accumulate(w.begin(), w.end(), 0.0) / double(w.size()); }

struct PathSummary {
    double final_wealth = 0.0;
    std::optional<int> ruin_year;
};

}  // namespace

StepOutput step(const ModelSpec& m, const FactorState& s, const NoiseDraw& z) {
    const std::size_t L = std::size_t(m.valuation.window);
    if (s.earnings.size() != L) {
        throw ValidationError("earnings window has " + std::to_string(s.earnings.size()) + " entries, model needs " +
                              std::to_string(L));
    }
    if (!(s.V > 0.0) || !(s.R > 0.0)) throw ValidationError("state needs V > 0 and R > 0");

    StepOutput out;
    FactorState& n = out.state;
    n.year = s.year + 1;
    n.V = std::exp(m.vol.intercept + m.vol.slope * std::log(s.V) + z[kZV]);
    n.R = std::exp(m.rate.intercept + m.rate.slope * std::log(s.R) + z[kZR]);
    n.S = m.spread.intercept + m.spread.slope * s.S + z[kZS];
    check_finite(n.V, "V", n.year);
    check_finite(n.R, "R", n.year);
    check_finite(n.S, "S", n.year);
    if (!(n.V > 0.0)) throw ValidationError("V underflowed to zero in simulated year " + std::to_string(n.year));
    if (!(n.R > 0.0)) throw ValidationError("R underflowed to zero in simulated year " + std::to_string(n.year));
    const double dR = n.R - s.R;

    const auto& g = m.growth;
    out.G = g.intercept + g.spread * s.S + g.vol * n.V + g.rate_change * dR + n.V * z[kZG];
    check_finite(out.G, "G", n.year);
    const double old_mean = window_mean(s.earnings);
    n.earnings.assign(s.earnings.begin() + 1, s.earnings.end());
    n.earnings.push_back(s.earnings.back() * std::exp(out.G));
    const double new_mean = window_mean(n.earnings);
    out.G_bar = std::log(new_mean) - std::log(old_mean);
    check_finite(out.G_bar, "G_bar", n.year);
    const double last = n.earnings.back();
    if (last > kRescaleHigh || last < kRescaleLow) {
        for (double& e : n.earnings) e /= last;
    }

    const auto& d = m.domestic;
    out.Q = d.intercept + d.spread * s.S + d.vol * n.V + d.rate_change * dR + d.valuation * s.H + n.V * z[kZQ];
    const auto& i = m.intl;
    out.I = i.intercept + i.vol * n.V + i.rate_change * dR + i.valuation * s.H + n.V * z[kZI];
    out.B = 0.01 * s.R - m.bond.a - m.bond.d * dR + z[kZB];
    check_finite(out.Q, "Q", n.year);
    check_finite(out.I, "I", n.year);
    check_finite(out.B, "B", n.year);

    n.H = s.H + out.Q - out.G_bar - m.valuation.c;
    check_finite(n.H, "H", n.year);
    return out;
}

void validate(const SimConfig& c) {
    std::vector<FieldError::Field> errors;
    auto unit = [&](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) errors.push_back({name, "must be in [0, 1]"});
    };
    if (!(c.initial_wealth > 0.0) || !std::isfinite(c.initial_wealth)) {
        errors.push_back({"initial_wealth", "must be a positive number"});
    }
    if (c.horizon < 1 || c.horizon > kMaxHorizon) {
        errors.push_back({"horizon", "must be between 1 and " + std::to_string(kMaxHorizon) + " years"});
    }
    unit(c.stock_share_start, "stock_share_start");
    unit(c.stock_share_end, "stock_share_end");
    unit(c.domestic_share, "domestic_share");
    if (!(c.cashflow.amount >= 0.0) || !std::isfinite(c.cashflow.amount)) {
        errors.push_back({"cashflow.amount", "must be a non-negative number"});
    }
    if (!(c.cashflow.growth_rate > -1.0) || !std::isfinite(c.cashflow.growth_rate)) {
        errors.push_back({"cashflow.growth_rate", "must be greater than -1"});
    }
    if (c.cashflow.frequency != 1 && c.cashflow.frequency != 4 && c.cashflow.frequency != 12) {
        errors.push_back({"cashflow.frequency", "must be 1, 4 or 12"});
    }
    if (c.n_paths < kMinPaths || c.n_paths > kMaxPaths) {
        errors.push_back({"n_paths", "must be between " + std::to_string(kMinPaths) + " and " +
                                         std::to_string(kMaxPaths)});
    }
    const auto& o = c.factor_overrides;
    if (o.V && !(*o.V > 0.0 && std::isfinite(*o.V))) errors.push_back({"factor_overrides.V", "must be positive"});
    if (o.R && !(*o.R > 0.0 && std::isfinite(*o.R))) errors.push_back({"factor_overrides.R", "must be positive"});
    if (o.S && !std::isfinite(*o.S)) errors.push_back({"factor_overrides.S", "must be finite"});
    if (o.H && !std::isfinite(*o.H)) errors.push_back({"factor_overrides.H", "must be finite"});
    if (!errors.empty()) throw FieldError(std::move(errors));
}

Weights glidepath(const SimConfig& c, int t) {
    const double share =
        c.stock_share_start + (c.stock_share_end - c.stock_share_start) * double(t) / double(c.horizon);
    return {share * c.domestic_share, share * (1.0 - c.domestic_share), 1.0 - share};
}

double effective_cashflow(double w, double r, int T) {
    if (T < 1) throw ValidationError("cashflow frequency must be positive");
    if (!(r > -1.0)) throw ValidationError("portfolio return must exceed -100%");
    if (T == 1 || std::abs(r) < 1e-12) return w;
    const double tt = double(T);
    return (w * r / tt) / std::expm1(std::log1p(r) / tt);
}

FactorState initial_state(const ModelSpec& m, const SimConfig& c) {
    FactorState s = m.defaults;
    const auto& o = c.factor_overrides;
    if (o.V) s.V = *o.V;
    if (o.R) s.R = *o.R;
    if (o.S) s.S = *o.S;
    if (o.H) s.H = *o.H;
    return s;
}

Simulator::Simulator(const ModelSpec& model, bool force) : model_(model), sampler_(model.filled, model.bandwidths) {
    const GateReport gate = model.gate();
    if (!gate.passed() && !force) {
        std::string msg = "model fails the stationarity conditions:";
        for (const auto& f : gate.failures()) msg += " " + f;
        throw NonStationaryError(msg);
    }
    if (model.defaults.earnings.size() != std::size_t(model.valuation.window)) {
        throw ValidationError("model defaults need an earnings window of length " +
                              std::to_string(model.valuation.window));
    }
}

WealthPath Simulator::simulate_path(const SimConfig& c, std::uint64_t path_index) const {
    WealthPath path;
    path.path_index = path_index;
    path.wealth.reserve(std::size_t(c.horizon) + 1);
    path.returns.reserve(std::size_t(c.horizon));
    path.wealth.push_back(c.initial_wealth);

    Rng rng(c.master_seed, path_index);
    FactorState state = initial_state(model_, c);
    const double sign = c.cashflow.direction == CashflowDirection::Contribute ? 1.0 : -1.0;
    double wealth = c.initial_wealth;
    for (int t = 1; t <= c.horizon; ++t) {
        const Weights w = glidepath(c, t - 1);
        StepOutput out = step(model_, state, sampler_.sample(rng));
        state = std::move(out.state);
        path.returns.push_back({out.Q, out.I, out.B});
        if (!path.ruin_year) {
            const double rp = w.domestic * std::expm1(out.Q) + w.intl * std::expm1(out.I) + w.bond * std::expm1(out.B);
            const double amount = c.cashflow.amount * std::pow(1.0 + c.cashflow.growth_rate, double(t - 1));
            wealth = wealth * (1.0 + rp) + sign * effective_cashflow(amount, rp, c.cashflow.frequency);
            if (!(wealth > 0.0)) {
                wealth = 0.0;
                path.ruin_year = t;
            }
        }
        path.wealth.push_back(wealth);
    }
    return path;
}

EnsembleResult Simulator::run_ensemble(const SimConfig& c, int workers) const {
    validate(c);
    const auto n = std::size_t(c.n_paths);
    std::vector<PathSummary> summaries(n);
    std::atomic<std::size_t> next{0};
    constexpr std::size_t kChunk = 64;
    auto work = [&] {
        for (;;) {
            const std::size_t begin = next.fetch_add(kChunk);
            if (begin >= n) return;
            const std::size_t end = std::min(n, begin + kChunk);
            for (std::size_t i = begin; i < end; ++i) {
                const WealthPath p = simulate_path(c, i);
                summaries[i] = {p.wealth.back(), p.ruin_year};
            }
        }
    };
    const int threads = std::max(1, std::min<int>(workers, int((n + kChunk - 1) / kChunk)));
    if (threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int k = 0; k < threads; ++k) pool.emplace_back(work);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = summaries[a];
        const auto& y = summaries[b];
        if (x.final_wealth != y.final_wealth) return x.final_wealth < y.final_wealth;
        const int rx = x.ruin_year.value_or(c.horizon + 1);
        const int ry = y.ruin_year.value_or(c.horizon + 1);
        if (rx != ry) return rx < ry;
        return a < b;
    });

    EnsembleResult r;
    r.n_paths = c.n_paths;
    r.master_seed = c.master_seed;
    r.start_year = initial_state(model_, c).year;
    std::size_t ruined = 0;
    double ruin_sum = 0.0;
    double wealth_sum = 0.0;
    for (const auto& s : summaries) {
        wealth_sum += s.final_wealth;
        if (s.ruin_year) {
            ++ruined;
            ruin_sum += double(*s.ruin_year);
        }
    }
    r.ruin_probability = double(ruined) / double(n);
    if (ruined > 0) r.mean_ruin_year = ruin_sum / double(ruined);
    r.mean_final_wealth = wealth_sum / double(n);
    for (int q : kPercentiles) {
        const auto rank = std::size_t(std::ceil(double(q) * double(n) / 100.0));
        r.percentile_paths.emplace(q, simulate_path(c, order[std::max<std::size_t>(rank, 1) - 1]));
    }
    r.p90_final_wealth = r.percentile_paths.at(90).wealth.back();
    return r;
}

Eigen::MatrixXd simulate_factors(const ModelSpec& model, int years, std::uint64_t seed, bool force) {
    const Simulator sim(model, force);
    Rng rng(seed, 0);
    FactorState state = model.defaults;
    Eigen::MatrixXd out(years, 4);
    for (int t = 0; t < years; ++t) {
        state = step(model, state, sim.sampler().sample(rng)).state;
        out(t, 0) = std::log(state.V);
        out(t, 1) = std::log(state.R);
        out(t, 2) = state.S;
        out(t, 3) = state.H;
    }
    return out;
}

}  // namespace assetsim
