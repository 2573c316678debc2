#pragma once

#include "assetsim/model.hpp"

#include <condition_variable>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>

namespace assetsim {

/// Counting budget of ensemble worker threads shared by concurrent requests.
class WorkerBudget {
public:
    explicit WorkerBudget(int total);

    class Lease {
    public:
        Lease(WorkerBudget& budget, int count) : budget_(&budget), count_(count) {}
        Lease(Lease&& other) noexcept : budget_(other.budget_), count_(other.count_) { other.budget_ = nullptr; }
        Lease(const Lease&) = delete;
        Lease& operator=(const Lease&) = delete;
        Lease& operator=(Lease&&) = delete;
        ~Lease();
        int count() const noexcept { return count_; }

    private:
        WorkerBudget* budget_;
        int count_;
    };

    /// Blocks until at least one worker is free, then takes up to `wanted`.
    Lease acquire(int wanted);
    int total() const noexcept { return total_; }

private:
    void release(int count);

    int total_;
    int available_;
    std::mutex mutex_;
    std::condition_variable cv_;
};

struct ApiResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

/// Request handlers independent of the transport.
class Api {
public:
    Api(ModelSpec model, int worker_budget);

    ApiResponse defaults() const;
    ApiResponse model() const;
    ApiResponse simulate(const std::string& body, const std::string& content_type);
    ApiResponse health() const;

private:
    ModelSpec model_;
    WorkerBudget budget_;
};

struct ServiceOptions {
    std::string host = "0.0.0.0";
    int port = 8080;
    std::filesystem::path static_dir;  ///< served at / when it exists
    int worker_budget = 0;             ///< 0 = hardware concurrency
};

/// Port from ASSETSIM_PORT when set and valid, else `fallback`.
int port_from_env(int fallback);

class Service {
public:
    Service(ModelSpec model, ServiceOptions options);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds to options.port (or any free port when it is 0) and returns the bound port.
    int bind();
    /// Serves until stop() is called. Call after bind().
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace assetsim
