#include "ccrl/checkpoint.hpp"

#include <fstream>
#include <json.hpp>

#include "ccrl/errors.hpp"

namespace ccrl {

namespace {
constexpr const char* kFormatName = "ccrl-policy-checkpoint";
constexpr int kFormatVersion = 1;
}  // namespace

void save_checkpoint(const PolicyNet& policy, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["format"] = kFormatName;
  doc["version"] = kFormatVersion;
  doc["architecture"] = {
      {"input_width", policy.input_width()},
      {"hidden_widths", policy.hidden_widths()},
      {"action_dim", PolicyNet::kActionDim},
      {"activation", "leaky_relu"},
      {"leaky_slope", policy.leaky_slope()},
      {"std_floor", policy.std_floor()},
  };
  const Eigen::VectorXd theta = policy.flatten();
  std::vector<double> params(theta.data(), theta.data() + theta.size());
  doc["params"] = params;

  std::ofstream out(path);
  if (!out) {
    throw ConfigInvalid("cannot open checkpoint file for writing: " + path.string());
  }
  out << doc.dump(2) << "\n";
}

PolicyNet load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigInvalid("cannot open checkpoint file: " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigInvalid("checkpoint " + path.string() + " is not valid JSON: " + e.what());
  }

  if (doc.value("format", "") != kFormatName) {
    throw ConfigInvalid("checkpoint " + path.string() + " has an unknown format tag");
  }
  if (doc.value("version", 0) != kFormatVersion) {
    throw ConfigInvalid("checkpoint " + path.string() + " has unsupported version");
  }
  const auto& arch = doc.at("architecture");
  if (arch.value("activation", "") != "leaky_relu") {
    throw ConfigInvalid("checkpoint activation must be leaky_relu");
  }

  PolicyNet policy(arch.at("input_width").get<int>(),
                   arch.at("hidden_widths").get<std::vector<int>>(),
                   arch.at("leaky_slope").get<double>(), arch.at("std_floor").get<double>());
  const auto params = doc.at("params").get<std::vector<double>>();
  if (static_cast<int>(params.size()) != policy.num_params()) {
    throw ConfigInvalid("checkpoint parameter count " + std::to_string(params.size()) +
                        " does not match architecture (" + std::to_string(policy.num_params()) +
                        ")");
  }
  policy.set_flat(Eigen::Map<const Eigen::VectorXd>(params.data(),
                                                    static_cast<Eigen::Index>(params.size())));
  return policy;
}

void check_architecture(const PolicyNet& policy, const PolicyConfig& cfg) {
  if (policy.input_width() != PolicyNet::kObservationWidth ||
      policy.hidden_widths() != cfg.hidden_widths || policy.leaky_slope() != cfg.leaky_slope ||
      policy.std_floor() != cfg.std_floor) {
    throw ArchitectureMismatch(
        "checkpoint architecture does not match the configured policy (hidden widths, slope or "
        "std_floor differ)");
  }
}

}  // namespace ccrl
