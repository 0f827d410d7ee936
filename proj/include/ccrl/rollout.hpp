#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "ccrl/policy_net.hpp"
#include "ccrl/return_functions.hpp"
#include "ccrl/trajectory.hpp"

namespace ccrl {

// Optional affine scaling of the five state components wherever a state
// appears in an observation: scaled = (x - offset) * scale.
struct ObsScaling {
  std::array<double, 5> scale{1.0, 1.0, 1.0, 1.0, 1.0};
  std::array<double, 5> offset{0.0, 0.0, 0.0, 0.0, 0.0};
};

struct RolloutConfig {
  SystemState initial_state{5.5, 0.005, 0.005, 1.545e-2, 1.655e-3};
  int horizon = 18;  // t_f, hours
  IntegratorConfig integrator;
  std::array<double, 2> u_max{10.0, 10.0};
  ReturnConfig ret;
  std::optional<ObsScaling> obs_scaling;
  int n_threads = 1;  // 0 => hardware concurrency
};

enum class ActionSelection { Sample, Mean };

// 15-vector [x_{t-1}, u_{t-2}, x_t, u_{t-1}, t*] with the time embedding
// t* = -1 + 2t/(t_f - 1). states must cover x_0..x_t and inputs u_0..u_{t-1};
// missing history at t = 0, 1 is padded with the initial state and zero
// inputs. Throws IndexOutOfRange when t >= t_f or the spans disagree with t.
Eigen::VectorXd build_observation(std::span<const SystemState> states,
                                  std::span<const LightInput> inputs, int t, int t_f,
                                  const ObsScaling* scaling = nullptr);

// One seeded episode: for t = 0..t_f-1, build the observation, query the
// policy, sample (or take the mean of) the action, clamp it into [0, u_max],
// and integrate one hour. Propagates NonFiniteState.
Trajectory run_episode(const PolicyNet& policy, const ModelParams& model, const RolloutConfig& cfg,
                       std::uint64_t seed, ActionSelection selection = ActionSelection::Sample);

// n_mc episodes with per-episode seeds derive_seed(epoch_seed, k). Episodes
// may run concurrently; the batch content is a pure function of the
// arguments. Episodes that end non-finite are excluded and recorded in
// `failed`; more than 10% of them throws BatchDegenerate.
EpisodeBatch run_batch(const PolicyNet& policy, const ModelParams& model, const RolloutConfig& cfg,
                       std::uint64_t epoch_seed, int n_mc);

}  // namespace ccrl
