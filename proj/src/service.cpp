#include "assetsim/service.hpp"

#include "assetsim/engine.hpp"
#include "assetsim/errors.hpp"
#include "assetsim/json_io.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <random>
#include <thread>

namespace assetsim {

namespace {

ApiResponse json_response(int status, const Json& body) { return {status, "application/json", body.dump()}; }

ApiResponse error_response(int status, const std::string& message, const Json& fields = Json::array()) {
    return json_response(status, {{"error", message}, {"fields", fields}});
}

int hardware_workers() { return std::max(1, int(std::thread::hardware_concurrency())); }

}  // namespace

WorkerBudget::WorkerBudget(int total) : total_(std::max(1, total)), available_(total_) {}

WorkerBudget::Lease::~Lease() {
    if (budget_) budget_->release(count_);
}

WorkerBudget::Lease WorkerBudget::acquire(int wanted) {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return available_ > 0; });
    const int take = std::clamp(wanted, 1, available_);
    available_ -= take;
    return Lease(*this, take);
}

void WorkerBudget::release(int count) {
    {
        std::lock_guard lock(mutex_);
        available_ += count;
    }
    cv_.notify_all();
}

Api::Api(ModelSpec model, int worker_budget)
    : model_(std::move(model)), budget_(worker_budget > 0 ? worker_budget : hardware_workers()) {}

ApiResponse Api::defaults() const { return json_response(200, defaults_json(model_)); }

ApiResponse Api::model() const { return json_response(200, model_summary_json(model_)); }

ApiResponse Api::health() const { return {200, "text/plain", "ok"}; }

ApiResponse Api::simulate(const std::string& body, const std::string& content_type) {
    const auto start = std::chrono::steady_clock::now();
    if (content_type.rfind("application/json", 0) != 0) {
        return error_response(415, "content type must be application/json");
    }
    Json doc;
    try {
        doc = Json::parse(body);
    } catch (const Json::parse_error& e) {
        return error_response(400, "malformed JSON", Json::array({{{"field", "body"}, {"message", e.what()}}}));
    }
    SimulateRequest req;
    try {
        req = request_from_json(doc);
    } catch (const FieldError& e) {
        Json fields = Json::array();
        for (const auto& f : e.fields()) fields.push_back({{"field", f.name}, {"message", f.message}});
        return error_response(400, "invalid request", fields);
    }
    if (!req.seed_supplied) req.config.master_seed = std::random_device{}() | (std::uint64_t(std::random_device{}()) << 32);

    const GateReport gate = model_.gate();
    if (!gate.passed() && !req.force) {
        Json failed = gate.failures();
        return json_response(409, {{"error", "model fails the stationarity conditions; set force to simulate anyway"},
                                   {"failed_conditions", failed}});
    }
    try {
        const Simulator sim(model_, req.force);
        const auto lease = budget_.acquire(budget_.total());
        const EnsembleResult result = sim.run_ensemble(req.config, lease.count());
        Json out = result_to_json(result, req.config);
        out["model"] = {{"name", model_.name}, {"schema_version", ModelSpec::kSchemaVersion}};
        out["elapsed_ms"] =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        return json_response(200, out);
    } catch (const ValidationError& e) {
        return error_response(422, e.what());
    }
}

int port_from_env(int fallback) {
    const char* env = std::getenv("ASSETSIM_PORT");
    if (!env) return fallback;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0 || v > 65535) return fallback;
    return int(v);
}

struct Service::Impl {
    Impl(ModelSpec model, ServiceOptions o) : api(std::move(model), o.worker_budget), options(std::move(o)) {
        auto send = [](httplib::Response& res, const ApiResponse& r) {
            res.status = r.status;
            res.set_content(r.body, r.content_type);
        };
        server.Get("/healthz", [this, send](const httplib::Request&, httplib::Response& res) { send(res, api.health()); });
        server.Get("/api/defaults",
                   [this, send](const httplib::Request&, httplib::Response& res) { send(res, api.defaults()); });
        server.Get("/api/model", [this, send](const httplib::Request&, httplib::Response& res) { send(res, api.model()); });
        server.Post("/api/simulate", [this, send](const httplib::Request& req, httplib::Response& res) {
            send(res, api.simulate(req.body, req.get_header_value("Content-Type")));
        });
        if (!options.static_dir.empty() && std::filesystem::is_directory(options.static_dir)) {
            server.set_mount_point("/", options.static_dir.string());
        }
    }

    Api api;
    ServiceOptions options;
    httplib::Server server;
};

Service::Service(ModelSpec model, ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(model), std::move(options))) {}

Service::~Service() = default;

int Service::bind() {
    auto& o = impl_->options;
    int port = o.port;
    if (port == 0) {
        port = impl_->server.bind_to_any_port(o.host);
    } else if (!impl_->server.bind_to_port(o.host, port)) {
        port = -1;
    }
    if (port < 0) throw IoError("cannot bind " + o.host + ":" + std::to_string(o.port));
    return port;
}

void Service::listen() { impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

}  // namespace assetsim
