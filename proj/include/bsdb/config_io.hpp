#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "bsdb/config.hpp"
#include "bsdb/errors.hpp"

namespace bsdb {

inline nlohmann::json config_to_json(const PipelineConfig& config) {
  nlohmann::json j;
  if (config.epsilon) j["epsilon"] = *config.epsilon;
  else j["epsilon"] = "auto";
  j["eta"] = config.eta;
  j["m"] = config.m;
  j["mu"] = config.mu;
  j["rho"] = config.rho;
  j["max_iterations"] = config.max_iterations;
  j["passes"] = config.passes;
  j["grid_rows"] = config.grid_rows;
  j["grid_cols"] = config.grid_cols;
  j["overlap_px"] = config.overlap_px;
  j["workers"] = config.workers;
  j["force_global_epsilon"] = config.force_global_epsilon;
  j["baseline_method"] = config.baseline_method;
  j["baseline_threshold"] = config.baseline_threshold;
  j["history"] = config.history;
  j["eigen_count"] = config.eigen_count;
  return j;
}

/// Missing keys keep their defaults; unknown keys are rejected. Range
/// validation is the caller's job (the CLI applies flag overrides first).
inline PipelineConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object())
    throw ParameterError("config must be a JSON object");
  PipelineConfig config;
  for (const auto& [key, value] : j.items()) {
    if (key == "epsilon") {
      if (value.is_string()) {
        if (value.get<std::string>() != "auto")
          throw ParameterError("epsilon must be a number or \"auto\"");
        config.epsilon.reset();
      } else {
        config.epsilon = value.get<double>();
      }
    } else if (key == "eta") config.eta = value.get<int>();
    else if (key == "m") config.m = value.get<int>();
    else if (key == "mu") config.mu = value.get<double>();
    else if (key == "rho") config.rho = value.get<double>();
    else if (key == "max_iterations") config.max_iterations = value.get<int>();
    else if (key == "passes") config.passes = value.get<int>();
    else if (key == "grid_rows") config.grid_rows = value.get<int>();
    else if (key == "grid_cols") config.grid_cols = value.get<int>();
    else if (key == "overlap_px") config.overlap_px = value.get<int>();
    else if (key == "workers") config.workers = value.get<int>();
    else if (key == "force_global_epsilon")
      config.force_global_epsilon = value.get<bool>();
    else if (key == "baseline_method")
      config.baseline_method = value.get<std::string>();
    else if (key == "baseline_threshold")
      config.baseline_threshold = value.get<double>();
    else if (key == "history") config.history = value.get<int>();
    else if (key == "eigen_count") config.eigen_count = value.get<int>();
    else throw ParameterError("unknown config key \"" + key + "\"");
  }
  return config;
}

inline std::string serialize_config(const PipelineConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

inline PipelineConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("config parse error: ") + e.what());
  }
  PipelineConfig config = config_from_json(j);
  config.validate();
  return config;
}

/// Parse without range validation, for callers that override fields before
/// validating.
inline PipelineConfig load_config_raw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("config parse error: ") + e.what());
  }
  return config_from_json(j);
}

inline PipelineConfig load_config(const std::string& path) {
  PipelineConfig config = load_config_raw(path);
  config.validate();
  return config;
}

inline void save_config(const std::string& path,
                        const PipelineConfig& config) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << serialize_config(config);
}

} // namespace bsdb
