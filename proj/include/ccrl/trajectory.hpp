#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "ccrl/dynamics.hpp"

namespace ccrl {

// One decision step: the observation the agent saw at time t, the action it
// took, and the state produced by integrating one hour under that action.
struct TrajectoryStep {
  Eigen::VectorXd observation;  // width 15
  Eigen::Vector2d raw_action;
  LightInput applied;
  double log_prob = 0.0;
  SystemState next_state;
};

struct Trajectory {
  SystemState initial_state;
  std::vector<TrajectoryStep> steps;  // t = 0 .. t_f-1

  int horizon() const { return static_cast<int>(steps.size()); }

  // State at time index t: t = 0 is the initial state, t >= 1 the state that
  // followed action t-1.
  const SystemState& state_at(int t) const {
    return t == 0 ? initial_state : steps[static_cast<std::size_t>(t) - 1].next_state;
  }
};

struct EpisodeBatch {
  std::vector<Trajectory> episodes;  // episode-index order, failures excluded
  std::vector<double> returns;       // J per episode, aligned with episodes
  std::vector<std::uint64_t> seeds;  // per-episode seeds, aligned with episodes
  std::vector<std::pair<int, std::uint64_t>> failed;  // (episode index, seed)
};

}  // namespace ccrl
