#pragma once

#include "assetsim/engine.hpp"
#include "assetsim/model.hpp"

#include <json.hpp>

#include <filesystem>

namespace assetsim {

using Json = nlohmann::json;

/// Versioned ModelSpec document. Missing residual entries are written as null.
Json model_to_json(const ModelSpec& model);
ModelSpec model_from_json(const Json& doc);
void save_model(const std::filesystem::path& path, const ModelSpec& model);
ModelSpec load_model(const std::filesystem::path& path);

/// Coefficients, bandwidths, residual correlation and the stationarity gate.
Json model_summary_json(const ModelSpec& model);
/// Default factor values and the allowed request ranges.
Json defaults_json(const ModelSpec& model);

struct SimulateRequest {
    SimConfig config;
    bool force = false;
    bool seed_supplied = false;
};

/// Parses and validates a request body. Unknown or mistyped fields and range
/// violations are collected into one FieldError.
SimulateRequest request_from_json(const Json& body);
Json config_to_json(const SimConfig& config);
Json result_to_json(const EnsembleResult& result, const SimConfig& config);

}  // namespace assetsim
