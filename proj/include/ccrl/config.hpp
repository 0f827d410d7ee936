#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "ccrl/rollout.hpp"
#include "ccrl/trainer.hpp"

namespace ccrl {

inline constexpr const char* kVersion = "0.1.0";

// One experiment = one config file. Every section is optional; omitted
// sections fall back to the co-culture case-study protocol (model parameter
// table, initial condition, 18 h horizon, case3 return design).
struct ExperimentConfig {
  ModelParams model;
  SystemState initial_state{5.5, 0.005, 0.005, 1.545e-2, 1.655e-3};
  int horizon = 18;  // t_f, hours
  IntegratorConfig integrator;
  PolicyConfig policy;
  TrainConfig train;
  ReturnConfig ret = ReturnConfig::preset("case3", 18);
  std::optional<ObsScaling> obs_scaling;
  int n_threads = 0;  // 0 => hardware concurrency
  std::filesystem::path output_dir = "runs/out";

  static ExperimentConfig defaults() { return {}; }

  // Strict parser: unknown keys and malformed values raise ConfigInvalid with
  // the dotted field path.
  static ExperimentConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  // Reads a JSON config file and applies dotted-path overrides of the form
  // "train.n_epochs=1" before parsing.
  static ExperimentConfig load(const std::filesystem::path& path,
                               const std::vector<std::string>& overrides = {});

  void validate() const;
  RolloutConfig rollout_config() const;
};

// Applies one "dotted.path=value" override to a JSON document. Values are
// parsed as JSON when possible and fall back to strings.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace ccrl
