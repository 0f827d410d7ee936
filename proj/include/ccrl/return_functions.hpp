#pragma once

#include <string_view>
#include <vector>

#include "ccrl/trajectory.hpp"

namespace ccrl {

enum class ReturnKind { Quadratic, Saturation };

// Episode return design. Quadratic is the benchmark (negated tracking cost);
// Saturation is the multiplicative inverse-saturation family whose steepness
// is set by beta_e1/beta_e2.
struct ReturnConfig {
  ReturnKind kind = ReturnKind::Saturation;
  double b1_star = 3.0;  // g/L
  double b2_star = 3.0;  // g/L
  int horizon = 18;      // t_f: number of scored post-action states

  // Quadratic
  double w1 = 1.0;
  double w2 = 1.0;

  // Saturation
  double beta_vmax = 1.0;   // reward at zero error
  double beta_e1 = 9.0;     // (g/L)^2
  double beta_e2 = 9.0;     // (g/L)^2
  std::vector<double> stage_weights;  // w_t for t = 1..t_f-1; empty => all 1
  double terminal_weight = 2.0;       // w_tf

  // "case1" is the quadratic benchmark; "case2"/"case3"/"case4" are the
  // saturation design with beta_e = 3 / 9 / 27, beta_vmax = 1, unit stage
  // weights and terminal weight 2.
  static ReturnConfig preset(std::string_view name, int horizon = 18);

  double stage_weight(int t) const;  // t in 1..horizon-1
  void validate() const;             // throws ConfigInvalid
};

// (b - b_star)^2
double squared_error(double b, double b_star);

// q_V = beta_vmax * beta_e1/(beta_e1 + e1) * beta_e2/(beta_e2 + e2)
double saturation_stage(double e1, double e2, const ReturnConfig& cfg);

// Scores the post-action states of traj (t = 1..t_f). Quadratic:
// J = -sum_t [w1 e1 + w2 e2]; Saturation: J = sum_{t<t_f} w_t q_V + w_tf q_V.
// Throws LengthMismatch unless traj holds exactly cfg.horizon steps.
double episode_return(const Trajectory& traj, const ReturnConfig& cfg);

}  // namespace ccrl
