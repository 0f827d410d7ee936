#include "ccrl/dynamics.hpp"

#include <cmath>

namespace ccrl {

namespace {

// Clamp that lets NaN/Inf pass through so blow-ups stay detectable.
inline double clamp_nonneg(double v) { return v < 0.0 ? 0.0 : v; }

inline std::array<double, 5> clamped(const std::array<double, 5>& y) {
  return {clamp_nonneg(y[0]), clamp_nonneg(y[1]), clamp_nonneg(y[2]), clamp_nonneg(y[3]),
          clamp_nonneg(y[4])};
}

inline std::array<double, 5> rhs_array(const std::array<double, 5>& y, const LightInput& u,
                                       const ModelParams& p) {
  // RK4 stage states can dip below zero mid-step; kinetics are evaluated on
  // the clamped state to stay inside their physical domain.
  const SystemState d = ode_rhs(SystemState::from_array(clamped(y)), u, p);
  return d.as_array();
}

}  // namespace

bool SystemState::all_finite() const {
  return std::isfinite(s) && std::isfinite(b1) && std::isfinite(b2) && std::isfinite(a1) &&
         std::isfinite(a2);
}

void ModelParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigInvalid(std::string("model.") + name + " must be a positive finite number");
    }
  };
  for (int i = 0; i < 2; ++i) {
    const std::string sfx = "[" + std::to_string(i) + "]";
    positive(mu_max[i], ("mu_max" + sfx).c_str());
    positive(k_s[i], ("k_s" + sfx).c_str());
    positive(k_a[i], ("k_a" + sfx).c_str());
    positive(y_sb[i], ("y_sb" + sfx).c_str());
    positive(q_a_max[i], ("q_a_max" + sfx).c_str());
    positive(k_i[i], ("k_i" + sfx).c_str());
    if (!(hill_n[i] >= 1.0)) {
      throw ConfigInvalid("model.hill_n" + sfx + " must be >= 1");
    }
    if (!(d_a[i] >= 0.0) || !std::isfinite(d_a[i])) {
      throw ConfigInvalid("model.d_a" + sfx + " must be >= 0");
    }
  }
  positive(f_c, "f_c");
  positive(d_l, "d_l");
  positive(s_in, "s_in");
}

double growth_rate(const SystemState& state, const ModelParams& params, int species) {
  const double substrate_factor = state.s / (state.s + params.k_s[species]);
  const double pool = params.f_c * state.amino(species);
  const double amino_factor = pool / (pool + params.k_a[species]);
  return params.mu_max[species] * substrate_factor * amino_factor;
}

double substrate_uptake_rate(const SystemState& state, const ModelParams& params, int species) {
  return params.y_sb[species] * growth_rate(state, params, species);
}

double amino_synthesis_rate(const LightInput& input, const ModelParams& params, int species) {
  const double intensity = input.intensity(species);
  if (intensity <= 0.0) {
    return 0.0;
  }
  const double num = std::pow(intensity, params.hill_n[species]);
  const double den = num + std::pow(params.k_i[species], params.hill_n[species]);
  return params.q_a_max[species] * num / den;
}

SystemState ode_rhs(const SystemState& state, const LightInput& input, const ModelParams& params) {
  const double mu1 = growth_rate(state, params, 0);
  const double mu2 = growth_rate(state, params, 1);

  SystemState d;
  d.s = -params.y_sb[0] * mu1 * state.b1 - params.y_sb[1] * mu2 * state.b2 +
        (params.s_in - state.s) * params.d_l;
  d.b1 = (mu1 - params.d_l) * state.b1;
  d.b2 = (mu2 - params.d_l) * state.b2;
  d.a1 = amino_synthesis_rate(input, params, 0) - (params.d_a[0] + mu1) * state.a1;
  d.a2 = amino_synthesis_rate(input, params, 1) - (params.d_a[1] + mu2) * state.a2;
  return d;
}

SystemState step(const SystemState& state, const LightInput& input, const ModelParams& params,
                 const IntegratorConfig& cfg, std::mt19937_64& rng) {
  std::array<double, 5> y = state.as_array();
  const double h = 1.0 / static_cast<double>(cfg.substeps_per_hour);

  for (int sub = 0; sub < cfg.substeps_per_hour; ++sub) {
    const auto k1 = rhs_array(y, input, params);
    std::array<double, 5> y2, y3, y4;
    for (int j = 0; j < 5; ++j) y2[j] = y[j] + 0.5 * h * k1[j];
    const auto k2 = rhs_array(y2, input, params);
    for (int j = 0; j < 5; ++j) y3[j] = y[j] + 0.5 * h * k2[j];
    const auto k3 = rhs_array(y3, input, params);
    for (int j = 0; j < 5; ++j) y4[j] = y[j] + h * k3[j];
    const auto k4 = rhs_array(y4, input, params);

    for (int j = 0; j < 5; ++j) {
      const double next = y[j] + (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      if (!std::isfinite(next)) {
        throw NonFiniteState("integration produced a non-finite state component");
      }
      y[j] = clamp_nonneg(next);
    }
  }

  if (cfg.noise_std.has_value()) {
    for (int j = 0; j < 5; ++j) {
      const double sd = (*cfg.noise_std)[j];
      if (sd > 0.0) {
        std::normal_distribution<double> noise(0.0, sd);
        const double next = y[j] + noise(rng);
        if (!std::isfinite(next)) {
          throw NonFiniteState("plant noise produced a non-finite state component");
        }
        y[j] = clamp_nonneg(next);
      }
    }
  }

  return SystemState::from_array(y);
}

}  // namespace ccrl
