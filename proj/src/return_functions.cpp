#include "ccrl/return_functions.hpp"

#include <cmath>
#include <string>

#include "ccrl/errors.hpp"

namespace ccrl {

ReturnConfig ReturnConfig::preset(std::string_view name, int horizon) {
  ReturnConfig cfg;
  cfg.horizon = horizon;
  if (name == "case1") {
    cfg.kind = ReturnKind::Quadratic;
    cfg.w1 = 1.0;
    cfg.w2 = 1.0;
  } else if (name == "case2" || name == "case3" || name == "case4") {
    cfg.kind = ReturnKind::Saturation;
    const double beta_e = name == "case2" ? 3.0 : (name == "case3" ? 9.0 : 27.0);
    cfg.beta_e1 = beta_e;
    cfg.beta_e2 = beta_e;
    cfg.beta_vmax = 1.0;
    cfg.stage_weights.assign(static_cast<std::size_t>(horizon - 1), 1.0);
    cfg.terminal_weight = 2.0;
  } else {
    throw ConfigInvalid("unknown return preset '" + std::string(name) +
                        "' (expected case1..case4)");
  }
  return cfg;
}

double ReturnConfig::stage_weight(int t) const {
  if (t < 1 || t >= horizon) {
    throw IndexOutOfRange("stage weight index " + std::to_string(t) + " outside 1.." +
                          std::to_string(horizon - 1));
  }
  if (stage_weights.empty()) {
    return 1.0;
  }
  return stage_weights[static_cast<std::size_t>(t) - 1];
}

void ReturnConfig::validate() const {
  if (horizon < 2) {
    throw ConfigInvalid("return.horizon must be >= 2");
  }
  if (!(b1_star > 0.0) || !(b2_star > 0.0)) {
    throw ConfigInvalid("return setpoints b1_star/b2_star must be > 0");
  }
  if (kind == ReturnKind::Quadratic) {
    if (w1 < 0.0 || w2 < 0.0) {
      throw ConfigInvalid("return.w1 and return.w2 must be >= 0");
    }
    return;
  }
  if (!(beta_vmax > 0.0)) {
    throw ConfigInvalid("return.beta_vmax must be > 0");
  }
  if (!(beta_e1 > 0.0)) {
    throw ConfigInvalid("return.beta_e1 must be > 0");
  }
  if (!(beta_e2 > 0.0)) {
    throw ConfigInvalid("return.beta_e2 must be > 0");
  }
  if (!stage_weights.empty() &&
      stage_weights.size() != static_cast<std::size_t>(horizon) - 1) {
    throw ConfigInvalid("return.stage_weights must have horizon-1 = " +
                        std::to_string(horizon - 1) + " entries, got " +
                        std::to_string(stage_weights.size()));
  }
  for (double w : stage_weights) {
    if (w < 0.0) {
      throw ConfigInvalid("return.stage_weights entries must be >= 0");
    }
  }
  if (terminal_weight < 0.0) {
    throw ConfigInvalid("return.terminal_weight must be >= 0");
  }
}

double squared_error(double b, double b_star) {
  const double d = b - b_star;
  return d * d;
}

double saturation_stage(double e1, double e2, const ReturnConfig& cfg) {
  return cfg.beta_vmax * (cfg.beta_e1 / (cfg.beta_e1 + e1)) * (cfg.beta_e2 / (cfg.beta_e2 + e2));
}

double episode_return(const Trajectory& traj, const ReturnConfig& cfg) {
  if (traj.horizon() != cfg.horizon) {
    throw LengthMismatch("trajectory holds " + std::to_string(traj.horizon()) +
                         " post-action states, return config expects " +
                         std::to_string(cfg.horizon));
  }
  double j = 0.0;
  for (int t = 1; t <= cfg.horizon; ++t) {
    const SystemState& x = traj.state_at(t);
    const double e1 = squared_error(x.b1, cfg.b1_star);
    const double e2 = squared_error(x.b2, cfg.b2_star);
    if (cfg.kind == ReturnKind::Quadratic) {
      j -= cfg.w1 * e1 + cfg.w2 * e2;
    } else {
      const double w = t == cfg.horizon ? cfg.terminal_weight : cfg.stage_weight(t);
      j += w * saturation_stage(e1, e2, cfg);
    }
  }
  return j;
}

}  // namespace ccrl
