#include "assetsim/json_io.hpp"

#include "assetsim/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace assetsim {

namespace {

Json series_json(const AnnualSeries& s) {
    return {{"start_year", s.start_year()}, {"values", std::vector<double>(s.values().begin(), s.values().end())}};
}

AnnualSeries series_from(const Json& j, std::string name) {
    if (j.is_null()) return {};
    return AnnualSeries(std::move(name), j.at("start_year").get<int>(), j.at("values").get<std::vector<double>>(),
                        Units::Dimensionless);
}

Json matrix_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double v = m(r, c);
            row.push_back(std::isnan(v) ? Json(nullptr) : Json(v));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from(const Json& rows, Eigen::Index cols) {
    Eigen::MatrixXd m(Eigen::Index(rows.size()), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows.at(r);
        if (Eigen::Index(row.size()) != cols) throw ValidationError("matrix row has the wrong length");
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto& v = row.at(std::size_t(c));
            m(Eigen::Index(r), c) = v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
        }
    }
    return m;
}

Json residuals_json(const ResidualMatrix& m) {
    Json j = {{"start_year", m.start_year},
              {"names", std::vector<std::string>(kInnovationNames.begin(), kInnovationNames.end())},
              {"values", matrix_json(m.values)}};
    if (m.correlation.size() > 0) {
        j["correlation_names"] = m.correlation_names;
        j["correlation"] = matrix_json(m.correlation);
    }
    return j;
}

ResidualMatrix residuals_from(const Json& j) {
    ResidualMatrix m;
    m.start_year = j.at("start_year").get<int>();
    m.values = matrix_from(j.at("values"), Eigen::Index(kNoiseDim));
    if (j.contains("correlation")) {
        m.correlation_names = j.at("correlation_names").get<std::vector<std::string>>();
        m.correlation = matrix_from(j.at("correlation"), Eigen::Index(m.correlation_names.size()));
    }
    return m;
}

Json gate_json(const GateReport& g) {
    return {{"passed", g.passed()}, {"vol", g.vol}, {"rate", g.rate}, {"spread", g.spread}, {"valuation", g.valuation}};
}

Json coefficients_json(const ModelSpec& m) {
    return {
        {"vol", {{"intercept", m.vol.intercept}, {"slope", m.vol.slope}}},
        {"rate", {{"intercept", m.rate.intercept}, {"slope", m.rate.slope}}},
        {"spread", {{"intercept", m.spread.intercept}, {"slope", m.spread.slope}}},
        {"growth",
         {{"intercept", m.growth.intercept},
          {"spread", m.growth.spread},
          {"vol", m.growth.vol},
          {"rate_change", m.growth.rate_change}}},
        {"domestic",
         {{"intercept", m.domestic.intercept},
          {"spread", m.domestic.spread},
          {"vol", m.domestic.vol},
          {"rate_change", m.domestic.rate_change},
          {"valuation", m.domestic.valuation}}},
        {"intl",
         {{"intercept", m.intl.intercept},
          {"vol", m.intl.vol},
          {"rate_change", m.intl.rate_change},
          {"valuation", m.intl.valuation}}},
        {"bond", {{"a_B", m.bond.a}, {"d_B", m.bond.d}}},
    };
}

Json valuation_json(const ValuationParams& v, bool with_series) {
    Json j = {{"alpha", v.alpha}, {"beta", v.beta}, {"gamma", v.gamma}, {"b", v.b},
              {"c", v.c},         {"h", v.h},       {"window", v.window}};
    if (with_series) j["H_series"] = v.H_series.empty() ? Json(nullptr) : series_json(v.H_series);
    return j;
}

Json state_json(const FactorState& s) {
    return {{"year", s.year}, {"V", s.V}, {"R", s.R}, {"S", s.S}, {"H", s.H}, {"earnings", s.earnings}};
}

}  // namespace

Json model_to_json(const ModelSpec& m) {
    Json j = coefficients_json(m);
    j["schema_version"] = ModelSpec::kSchemaVersion;
    j["name"] = m.name;
    j["valuation"] = valuation_json(m.valuation, true);
    j["residuals"] = residuals_json(m.residuals);
    j["filled"] = residuals_json(m.filled);
    j["bandwidths"] = {{"sigma", m.bandwidths.sigma}, {"d", m.bandwidths.d}, {"n", m.bandwidths.n}};
    j["fill_seed"] = m.fill_seed;
    j["defaults"] = state_json(m.defaults);
    j["gate"] = gate_json(m.gate());
    return j;
}

ModelSpec model_from_json(const Json& j) {
    try {
        const int version = j.at("schema_version").get<int>();
        if (version != ModelSpec::kSchemaVersion) {
            throw ValidationError("unsupported model schema_version " + std::to_string(version));
        }
        ModelSpec m;
        m.name = j.value("name", std::string("fitted"));
        auto ar1 = [&](const char* key) {
            const auto& a = j.at(key);
            return Ar1Coefs{a.at("intercept").get<double>(), a.at("slope").get<double>()};
        };
        m.vol = ar1("vol");
        m.rate = ar1("rate");
        m.spread = ar1("spread");
        const auto& g = j.at("growth");
        m.growth = {g.at("intercept").get<double>(), g.at("spread").get<double>(), g.at("vol").get<double>(),
                    g.at("rate_change").get<double>()};
        const auto& d = j.at("domestic");
        m.domestic = {d.at("intercept").get<double>(), d.at("spread").get<double>(), d.at("vol").get<double>(),
                      d.at("rate_change").get<double>(), d.at("valuation").get<double>()};
        const auto& i = j.at("intl");
        m.intl = {i.at("intercept").get<double>(), i.at("vol").get<double>(), i.at("rate_change").get<double>(),
                  i.at("valuation").get<double>()};
        m.bond = {j.at("bond").at("a_B").get<double>(), j.at("bond").at("d_B").get<double>()};

        const auto& v = j.at("valuation");
        m.valuation.alpha = v.at("alpha").get<double>();
        m.valuation.beta = v.at("beta").get<double>();
        m.valuation.gamma = v.at("gamma").get<double>();
        m.valuation.b = v.at("b").get<double>();
        m.valuation.c = v.at("c").get<double>();
        m.valuation.h = v.at("h").get<double>();
        m.valuation.window = v.at("window").get<int>();
        m.valuation.H_series = series_from(v.value("H_series", Json(nullptr)), "H");

        m.residuals = residuals_from(j.at("residuals"));
        m.filled = residuals_from(j.at("filled"));
        const auto& bw = j.at("bandwidths");
        const auto sigma = bw.at("sigma").get<std::vector<double>>();
        if (sigma.size() != kNoiseDim) throw ValidationError("bandwidths.sigma needs 7 entries");
        std::copy(sigma.begin(), sigma.end(), m.bandwidths.sigma.begin());
        m.bandwidths.d = bw.at("d").get<int>();
        m.bandwidths.n = bw.at("n").get<int>();
        m.fill_seed = j.at("fill_seed").get<std::uint64_t>();

        const auto& s = j.at("defaults");
        m.defaults.year = s.at("year").get<int>();
        m.defaults.V = s.at("V").get<double>();
        m.defaults.R = s.at("R").get<double>();
        m.defaults.S = s.at("S").get<double>();
        m.defaults.H = s.at("H").get<double>();
        m.defaults.earnings = s.at("earnings").get<std::vector<double>>();
        if (m.defaults.earnings.size() != std::size_t(m.valuation.window)) {
            throw ValidationError("defaults.earnings must hold valuation.window entries");
        }
        for (double e : m.defaults.earnings) {
            if (!(e > 0.0)) throw ValidationError("defaults.earnings must be positive");
        }
        if (!m.filled.complete()) throw ValidationError("filled residual matrix has missing entries");
        return m;
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("model document: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const ModelSpec& model) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << model_to_json(model).dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

ModelSpec load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model " + path.string());
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError("model " + path.string() + ": " + e.what());
    }
    return model_from_json(doc);
}

Json model_summary_json(const ModelSpec& m) {
    Json j = coefficients_json(m);
    j["schema_version"] = ModelSpec::kSchemaVersion;
    j["name"] = m.name;
    j["valuation"] = valuation_json(m.valuation, false);
    j["bandwidths"] = {{"sigma", m.bandwidths.sigma}, {"d", m.bandwidths.d}, {"n", m.bandwidths.n}};
    j["residuals"] = {{"start_year", m.residuals.start_year},
                      {"end_year", m.residuals.end_year()},
                      {"names", std::vector<std::string>(kInnovationNames.begin(), kInnovationNames.end())}};
    Json counts = Json::array();
    for (std::size_t c = 0; c < kNoiseDim; ++c) counts.push_back(m.residuals.present_count(c));
    j["residuals"]["observed"] = counts;
    if (m.residuals.correlation.size() > 0) {
        j["correlation"] = {{"names", m.residuals.correlation_names},
                            {"matrix", matrix_json(m.residuals.correlation)}};
    }
    j["gate"] = gate_json(m.gate());
    j["defaults"] = state_json(m.defaults);
    return j;
}

Json defaults_json(const ModelSpec& m) {
    return {{"factors", state_json(m.defaults)},
            {"config", config_to_json(SimConfig{})},
            {"ranges",
             {{"horizon", {{"min", 1}, {"max", kMaxHorizon}}},
              {"stock_share_start", {{"min", 0.0}, {"max", 1.0}}},
              {"stock_share_end", {{"min", 0.0}, {"max", 1.0}}},
              {"domestic_share", {{"min", 0.0}, {"max", 1.0}}},
              {"n_paths", {{"min", kMinPaths}, {"max", kMaxPaths}}},
              {"cashflow.frequency", {1, 4, 12}}}},
            {"gate", gate_json(m.gate())}};
}

SimulateRequest request_from_json(const Json& body) {
    std::vector<FieldError::Field> errors;
    SimulateRequest req;
    SimConfig& c = req.config;
    if (!body.is_object()) throw FieldError(std::vector<FieldError::Field>{{"body", "must be a JSON object"}});

    auto number = [&](const Json& obj, const char* key, const std::string& path, double& out) {
        if (!obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (!v.is_number()) {
            errors.push_back({path, "must be a number"});
            return;
        }
        out = v.get<double>();
    };
    auto integer = [&](const Json& obj, const char* key, const std::string& path, int& out) {
        if (!obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (!v.is_number_integer()) {
            errors.push_back({path, "must be an integer"});
            return;
        }
        const auto x = v.get<long long>();
        if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
            errors.push_back({path, "is out of range"});
            return;
        }
        out = int(x);
    };
    auto unknown = [&](const Json& obj, const std::set<std::string>& known, const std::string& prefix) {
        for (const auto& [key, value] : obj.items()) {
            if (!known.count(key)) errors.push_back({prefix + key, "unknown field"});
        }
    };

    unknown(body,
            {"initial_wealth", "horizon", "stock_share_start", "stock_share_end", "domestic_share", "cashflow",
             "n_paths", "master_seed", "factor_overrides", "force"},
            "");
    number(body, "initial_wealth", "initial_wealth", c.initial_wealth);
    integer(body, "horizon", "horizon", c.horizon);
    number(body, "stock_share_start", "stock_share_start", c.stock_share_start);
    number(body, "stock_share_end", "stock_share_end", c.stock_share_end);
    number(body, "domestic_share", "domestic_share", c.domestic_share);
    integer(body, "n_paths", "n_paths", c.n_paths);
    if (body.contains("master_seed") && !body.at("master_seed").is_null()) {
        const auto& v = body.at("master_seed");
        if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)) {
            c.master_seed = v.get<std::uint64_t>();
            req.seed_supplied = true;
        } else {
            errors.push_back({"master_seed", "must be a non-negative integer"});
        }
    }
    if (body.contains("force")) {
        if (body.at("force").is_boolean()) {
            req.force = body.at("force").get<bool>();
        } else {
            errors.push_back({"force", "must be a boolean"});
        }
    }
    if (body.contains("cashflow")) {
        const auto& cf = body.at("cashflow");
        if (!cf.is_object()) {
            errors.push_back({"cashflow", "must be an object"});
        } else {
            unknown(cf, {"amount", "direction", "growth_rate", "frequency"}, "cashflow.");
            number(cf, "amount", "cashflow.amount", c.cashflow.amount);
            number(cf, "growth_rate", "cashflow.growth_rate", c.cashflow.growth_rate);
            if (cf.contains("direction")) {
                const auto& d = cf.at("direction");
                if (d == "withdraw") {
                    c.cashflow.direction = CashflowDirection::Withdraw;
                } else if (d == "contribute") {
                    c.cashflow.direction = CashflowDirection::Contribute;
                } else {
                    errors.push_back({"cashflow.direction", "must be \"withdraw\" or \"contribute\""});
                }
            }
            if (cf.contains("frequency")) {
                const auto& f = cf.at("frequency");
                if (f == "annual") {
                    c.cashflow.frequency = 1;
                } else if (f == "quarterly") {
                    c.cashflow.frequency = 4;
                } else if (f == "monthly") {
                    c.cashflow.frequency = 12;
                } else {
                    integer(cf, "frequency", "cashflow.frequency", c.cashflow.frequency);
                }
            }
        }
    }
    if (body.contains("factor_overrides") && !body.at("factor_overrides").is_null()) {
        const auto& o = body.at("factor_overrides");
        if (!o.is_object()) {
            errors.push_back({"factor_overrides", "must be an object"});
        } else {
            unknown(o, {"V", "R", "S", "H"}, "factor_overrides.");
            auto opt = [&](const char* key, std::optional<double>& out) {
                if (!o.contains(key) || o.at(key).is_null()) return;
                double v = 0.0;
                const std::size_t before = errors.size();
                number(o, key, std::string("factor_overrides.") + key, v);
                if (errors.size() == before) out = v;
            };
            opt("V", c.factor_overrides.V);
            opt("R", c.factor_overrides.R);
            opt("S", c.factor_overrides.S);
            opt("H", c.factor_overrides.H);
        }
    }
    try {
        validate(c);
    } catch (const FieldError& e) {
        errors.insert(errors.end(), e.fields().begin(), e.fields().end());
    }
    if (!errors.empty()) throw FieldError(std::move(errors));
    return req;
}

Json config_to_json(const SimConfig& c) {
    Json overrides = Json::object();
    const auto& o = c.factor_overrides;
    if (o.V) overrides["V"] = *o.V;
    if (o.R) overrides["R"] = *o.R;
    if (o.S) overrides["S"] = *o.S;
    if (o.H) overrides["H"] = *o.H;
    return {{"initial_wealth", c.initial_wealth},
            {"horizon", c.horizon},
            {"stock_share_start", c.stock_share_start},
            {"stock_share_end", c.stock_share_end},
            {"domestic_share", c.domestic_share},
            {"cashflow",
             {{"amount", c.cashflow.amount},
              {"direction", c.cashflow.direction == CashflowDirection::Withdraw ? "withdraw" : "contribute"},
              {"growth_rate", c.cashflow.growth_rate},
              {"frequency", c.cashflow.frequency}}},
            {"n_paths", c.n_paths},
            {"master_seed", c.master_seed},
            {"factor_overrides", overrides}};
}

Json result_to_json(const EnsembleResult& r, const SimConfig& c) {
    Json paths = Json::object();
    for (const auto& [q, p] : r.percentile_paths) {
        Json wealth = Json::array();
        Json returns = Json::array();
        for (std::size_t t = 0; t < p.wealth.size(); ++t) {
            wealth.push_back({{"year", r.start_year + int(t)}, {"wealth", p.wealth[t]}});
        }
        for (std::size_t t = 0; t < p.returns.size(); ++t) {
            returns.push_back({{"year", r.start_year + int(t) + 1},
                               {"Q", p.returns[t][0]},
                               {"I", p.returns[t][1]},
                               {"B", p.returns[t][2]}});
        }
        paths[std::to_string(q)] = {{"path_index", p.path_index},
                                    {"ruin_year", p.ruin_year ? Json(*p.ruin_year) : Json(nullptr)},
                                    {"wealth", wealth},
                                    {"returns", returns}};
    }
    return {{"config", config_to_json(c)},
            {"n_paths", r.n_paths},
            {"master_seed", r.master_seed},
            {"start_year", r.start_year},
            {"ruin_probability", r.ruin_probability},
            {"mean_ruin_year", r.mean_ruin_year ? Json(*r.mean_ruin_year) : Json(nullptr)},
            {"mean_final_wealth", r.mean_final_wealth},
            {"p90_final_wealth", r.p90_final_wealth},
            {"percentile_paths", paths}};
}

}  // namespace assetsim
