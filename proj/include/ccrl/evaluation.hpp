#pragma once

#include <cstdint>
#include <vector>

#include "ccrl/rollout.hpp"

namespace ccrl {

// Frozen-policy rollout statistics: per-time mean/std bands over episodes for
// every state, input and growth rate, plus the tracking summaries used in the
// evaluation report.
struct EvaluationResult {
  int n_episodes = 0;
  bool deterministic = false;

  struct Series {
    std::vector<double> mean;
    std::vector<double> stdev;
  };

  // Indexed by time t = 0..t_f for states and growth rates; inputs are
  // indexed by the step t = 0..t_f-1 during which they were applied.
  Series s, b1, b2, a1, a2;
  Series mu1, mu2;
  Series i1, i2;

  double mean_return = 0.0;
  std::array<double, 2> terminal_abs_error{};      // |b_i(t_f) - b_i*|, mean over episodes
  std::array<double, 2> final_window_abs_error{};  // mean |b_i - b_i*| over the last final_window_hours
  std::array<double, 2> final_growth_deviation{};  // mean |mu_i - d_l| over the last growth_window_hours
  int final_window_hours = 5;
  int growth_window_hours = 3;

  std::vector<Trajectory> episodes;
};

EvaluationResult evaluate_policy(const PolicyNet& policy, const ModelParams& model,
                                 const RolloutConfig& cfg, int n_episodes, std::uint64_t seed,
                                 bool deterministic, int final_window_hours = 5,
                                 int growth_window_hours = 3);

}  // namespace ccrl
