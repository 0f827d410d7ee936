#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>

#include "ccrl/errors.hpp"

namespace ccrl {

// Dynamic states of the chemostat co-culture.
struct SystemState {
  double s = 0.0;   // substrate concentration, mmol/L
  double b1 = 0.0;  // E. coli 1 biomass, g/L
  double b2 = 0.0;  // E. coli 2 biomass, g/L
  double a1 = 0.0;  // intracellular amino acid of species 1, mmol/g
  double a2 = 0.0;  // intracellular amino acid of species 2, mmol/g

  double biomass(int species) const { return species == 0 ? b1 : b2; }
  double amino(int species) const { return species == 0 ? a1 : a2; }

  std::array<double, 5> as_array() const { return {s, b1, b2, a1, a2}; }
  static SystemState from_array(const std::array<double, 5>& v) {
    return {v[0], v[1], v[2], v[3], v[4]};
  }
  bool all_finite() const;
};

// Control inputs. The two channels live in different physical units.
struct LightInput {
  double i1 = 0.0;  // blue light, W/m^2 (species 1)
  double i2 = 0.0;  // red light, uW/cm^2 (species 2)

  double intensity(int species) const { return species == 0 ? i1 : i2; }
};

// Kinetic and reactor parameters; index 0 is species 1, index 1 is species 2.
struct ModelParams {
  std::array<double, 2> mu_max{0.982, 0.982};        // max growth rate, 1/h
  std::array<double, 2> k_s{2.964e-4, 2.964e-4};     // substrate half-saturation, mmol/L
  double f_c = 1100.0;                               // cytosol density conversion, g/L
  std::array<double, 2> k_a{1.7, 0.182};             // amino half-saturation, mmol/L
  std::array<double, 2> y_sb{10.18, 10.18};          // substrate yield, mmol/g
  std::array<double, 2> q_a_max{0.337, 0.036};       // max amino synthesis, mmol/g/h
  std::array<double, 2> hill_n{2.0, 4.865};          // light induction Hill exponent
  std::array<double, 2> k_i{1.052, 1.34};            // light half-saturation, W/m^2 / uW/cm^2
  std::array<double, 2> d_a{2.0, 2.0};               // amino degradation rate, 1/h
  double d_l = 0.15;                                 // dilution rate, 1/h
  double s_in = 200.0;                               // inflow substrate, mmol/L

  static ModelParams defaults() { return {}; }
  void validate() const;  // throws ConfigInvalid naming the offending field
};

struct IntegratorConfig {
  int substeps_per_hour = 20;
  // Additive zero-mean Gaussian noise applied once per 1 h step, per state
  // component (s, b1, b2, a1, a2). Absent => deterministic plant.
  std::optional<std::array<double, 5>> noise_std;
};

// mu_i = mu_max_i * s/(s + k_s_i) * f_c*a_i/(f_c*a_i + k_a_i), in [0, mu_max_i].
double growth_rate(const SystemState& state, const ModelParams& params, int species);

// q_s,i = Y_sb_i * mu_i.
double substrate_uptake_rate(const SystemState& state, const ModelParams& params, int species);

// q_a,i = q_a_max_i * I^n / (I^n + k_I^n).
double amino_synthesis_rate(const LightInput& input, const ModelParams& params, int species);

// Time derivative of every state, packed in SystemState order (per-hour rates).
SystemState ode_rhs(const SystemState& state, const LightInput& input, const ModelParams& params);

// Advances the state by one hour under a zero-order-held input, using classical
// RK4 with cfg.substeps_per_hour fixed substeps. States are clamped at zero
// after each substep; stage evaluations see clamped states as well. If
// cfg.noise_std is set, draws one Gaussian per component from rng after the
// hour and clamps again. Throws NonFiniteState on integrator blow-up.
SystemState step(const SystemState& state, const LightInput& input, const ModelParams& params,
                 const IntegratorConfig& cfg, std::mt19937_64& rng);

}  // namespace ccrl
