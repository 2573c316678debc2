#include "assetsim/cli.hpp"

#include "assetsim/dataio.hpp"
#include "assetsim/diagnostics.hpp"
#include "assetsim/econometrics.hpp"
#include "assetsim/engine.hpp"
#include "assetsim/errors.hpp"
#include "assetsim/json_io.hpp"
#include "assetsim/reference.hpp"
#include "assetsim/service.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iomanip>
#include <optional>
#include <thread>

namespace assetsim {

namespace {

Service* g_service = nullptr;

void on_signal(int) {
    if (g_service) g_service->stop();
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

DerivedSeries derive_from(const std::filesystem::path& manifest, std::ostream& err) {
    const Manifest m = load_manifest(manifest);
    for (const auto& w : validate_bundle(m.bundle)) err << "warning: " << w << '\n';
    DerivedSeries d = derive_series(m.bundle, m.options);
    for (const auto& w : d.warnings) err << "warning: " << w << '\n';
    return d;
}

void write_coefficients(std::ostream& os, const std::vector<CoefficientRow>& rows) {
    os << std::left << std::setw(12) << "equation" << std::setw(14) << "coefficient" << std::right << std::setw(12)
       << "estimate" << std::setw(11) << "stderr" << std::setw(9) << "p" << '\n';
    for (const auto& r : rows) {
        os << std::left << std::setw(12) << r.equation << std::setw(14) << r.name << std::right << std::fixed
           << std::setprecision(6) << std::setw(12) << r.estimate << std::setw(11) << r.stderr_ << std::setprecision(3)
           << std::setw(9) << r.p_value << '\n';
    }
    os.unsetf(std::ios::floatfield);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Asset return model fitting and wealth simulation"};
    app.require_subcommand(1);

    std::string manifest, out_path, model_path, config_path, preset, residuals_path, static_dir;
    std::uint64_t fill_seed = 2024;
    bool csv = false, lag_table = false, force = false;
    int n = 100, reps = 200000, workers = 1, port = 8080;
    std::vector<double> levels{0.95};
    std::optional<std::uint64_t> seed;

    auto* derive = app.add_subcommand("derive", "Compute derived annual series from a manifest");
    derive->add_option("--manifest", manifest, "Manifest JSON")->required();
    derive->add_option("--out", out_path, "Output directory")->required();

    auto* fit = app.add_subcommand("fit", "Fit the model and write ModelSpec JSON");
    fit->add_option("--manifest", manifest, "Manifest JSON");
    fit->add_option("--preset", preset, "Use a built-in preset instead of data")->check(CLI::IsMember({"reference"}));
    fit->add_option("--out", out_path, "ModelSpec output path")->required();
    fit->add_option("--fill-seed", fill_seed, "Seed for filling missing residuals");
    fit->add_option("--residuals", residuals_path, "Also write the residual matrix CSV");

    auto* diag = app.add_subcommand("diagnose", "Residual white-noise reports");
    diag->add_option("--manifest", manifest, "Manifest JSON")->required();
    diag->add_flag("--csv", csv, "CSV instead of aligned text");
    diag->add_flag("--lag-selection", lag_table, "Also report averaging windows 1..10");

    auto* crit = app.add_subcommand("critical-values", "Monte Carlo critical values under Gaussian white noise");
    crit->add_option("--n", n, "Sample size")->required();
    crit->add_option("--level", levels, "Quantile level(s)")->required();
    crit->add_option("--reps", reps, "Replications");
    crit->add_option("--seed", seed, "Master seed");
    crit->add_option("--workers", workers, "Worker threads");
    crit->add_flag("--csv", csv, "CSV instead of aligned text");

    auto* sim = app.add_subcommand("simulate", "Run a wealth ensemble");
    sim->add_option("--model", model_path, "ModelSpec JSON")->required();
    sim->add_option("--config", config_path, "SimConfig JSON");
    sim->add_option("--seed", seed, "Master seed (overrides the config)");
    sim->add_option("--out", out_path, "EnsembleResult JSON path (default stdout)");
    sim->add_option("--workers", workers, "Worker threads");
    sim->add_flag("--force", force, "Simulate a model that fails the stationarity conditions");

    auto* serve = app.add_subcommand("serve", "Start the HTTP service");
    serve->add_option("--model", model_path, "ModelSpec JSON")->required();
    auto* port_opt = serve->add_option("--port", port, "Port (ASSETSIM_PORT when omitted)");
    serve->add_option("--static", static_dir, "Directory of web assets served at /");
    serve->add_option("--workers", workers, "Shared ensemble worker budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (*derive) {
            const DerivedSeries d = derive_from(manifest, err);
            std::filesystem::create_directories(out_path);
            for (const auto* s : d.all()) write_annual_csv(std::filesystem::path(out_path) / (s->name() + ".csv"), *s);
            out << "wrote " << d.all().size() << " series to " << out_path << '\n';
        } else if (*fit) {
            if (manifest.empty() == preset.empty()) throw ValidationError("fit needs exactly one of --manifest or --preset");
            ModelSpec model;
            if (!preset.empty()) {
                model = reference_model();
            } else {
                const DerivedSeries d = derive_from(manifest, err);
                const FitOptions options{fill_seed, false};
                const ModelFits fits = fit_all(d, options);
                write_coefficients(out, coefficient_table(fits));
                model = assemble_model(fits, d, options);
            }
            save_model(out_path, model);
            if (!residuals_path.empty()) {
                auto f = open_out(residuals_path);
                write_residuals_csv(f, model.residuals);
            }
            const GateReport gate = model.gate();
            out << "stationarity gate: " << (gate.passed() ? "passed" : "FAILED") << '\n';
            for (const auto& f : gate.failures()) out << "  fails " << f << '\n';
        } else if (*diag) {
            const DerivedSeries d = derive_from(manifest, err);
            const ModelFits fits = fit_all(d);
            const auto reports = residual_reports(fits);
            csv ? write_reports_csv(out, reports) : write_reports_text(out, reports);
            if (lag_table) {
                out << '\n';
                std::vector<DiagnosticsReport> rows;
                for (auto& row : lag_selection(d.Q, d.E)) {
                    row.residuals.name = "L=" + std::to_string(row.window);
                    out << row.residuals.name << " R^2 = " << row.r_squared << '\n';
                    rows.push_back(row.residuals);
                }
                csv ? write_reports_csv(out, rows) : write_reports_text(out, rows);
            }
        } else if (*crit) {
            const auto tables = mc_critical_values(n, levels, reps, seed.value_or(7), workers);
            csv ? write_critical_values_csv(out, tables) : write_critical_values_text(out, tables);
        } else if (*sim) {
            const ModelSpec model = load_model(model_path);
            SimulateRequest req;
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                if (!in) throw IoError("cannot open config " + config_path);
                Json doc;
                try {
                    doc = Json::parse(in);
                } catch (const Json::parse_error& e) {
                    throw ValidationError("config " + config_path + ": " + e.what());
                }
                req = request_from_json(doc);
            }
            if (seed) req.config.master_seed = *seed;
            validate(req.config);
            const Simulator simulator(model, force || req.force);
            const EnsembleResult result = simulator.run_ensemble(req.config, workers);
            const std::string text = result_to_json(result, req.config).dump(2) + "\n";
            if (out_path.empty()) {
                out << text;
            } else {
                auto f = open_out(out_path);
                f << text;
                if (!f) throw IoError("write failed for " + out_path);
            }
        } else if (*serve) {
            ServiceOptions options;
            options.port = port_opt->count() > 0 ? port : port_from_env(port);
            options.static_dir = static_dir;
            options.worker_budget = workers > 1 ? workers : int(std::thread::hardware_concurrency());
            Service service(load_model(model_path), options);
            const int bound = service.bind();
            out << "listening on " << options.host << ':' << bound << std::endl;
            g_service = &service;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            service.listen();
            g_service = nullptr;
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace assetsim
