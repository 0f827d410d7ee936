#include "ccrl/rollout.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "ccrl/seeding.hpp"

namespace ccrl {

namespace {

void put_state(Eigen::VectorXd& obs, int pos, const SystemState& x, const ObsScaling* sc) {
  const auto arr = x.as_array();
  for (int j = 0; j < 5; ++j) {
    obs[pos + j] = sc ? (arr[j] - sc->offset[j]) * sc->scale[j] : arr[j];
  }
}

int resolve_threads(int n_threads) {
  if (n_threads > 0) {
    return n_threads;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

Eigen::VectorXd build_observation(std::span<const SystemState> states,
                                  std::span<const LightInput> inputs, int t, int t_f,
                                  const ObsScaling* scaling) {
  if (t_f < 2) {
    throw IndexOutOfRange("horizon must be >= 2 for the time embedding");
  }
  if (t < 0 || t >= t_f) {
    throw IndexOutOfRange("time index " + std::to_string(t) + " outside 0.." +
                          std::to_string(t_f - 1));
  }
  if (states.size() != static_cast<std::size_t>(t) + 1 ||
      inputs.size() != static_cast<std::size_t>(t)) {
    throw IndexOutOfRange("history spans do not match time index " + std::to_string(t));
  }

  const SystemState& current = states[static_cast<std::size_t>(t)];
  const SystemState& previous = t >= 1 ? states[static_cast<std::size_t>(t) - 1] : states[0];
  const LightInput prev_input = t >= 1 ? inputs[static_cast<std::size_t>(t) - 1] : LightInput{};
  const LightInput prev2_input = t >= 2 ? inputs[static_cast<std::size_t>(t) - 2] : LightInput{};

  Eigen::VectorXd obs(PolicyNet::kObservationWidth);
  put_state(obs, 0, previous, scaling);
  obs[5] = prev2_input.i1;
  obs[6] = prev2_input.i2;
  put_state(obs, 7, current, scaling);
  obs[12] = prev_input.i1;
  obs[13] = prev_input.i2;
  obs[14] = -1.0 + 2.0 * static_cast<double>(t) / static_cast<double>(t_f - 1);
  return obs;
}

Trajectory run_episode(const PolicyNet& policy, const ModelParams& model, const RolloutConfig& cfg,
                       std::uint64_t seed, ActionSelection selection) {
  std::mt19937_64 rng(seed);
  const ObsScaling* scaling = cfg.obs_scaling ? &*cfg.obs_scaling : nullptr;

  Trajectory traj;
  traj.initial_state = cfg.initial_state;
  traj.steps.reserve(static_cast<std::size_t>(cfg.horizon));

  std::vector<SystemState> states{cfg.initial_state};
  std::vector<LightInput> inputs;
  states.reserve(static_cast<std::size_t>(cfg.horizon) + 1);
  inputs.reserve(static_cast<std::size_t>(cfg.horizon));

  for (int t = 0; t < cfg.horizon; ++t) {
    TrajectoryStep step_record;
    step_record.observation = build_observation(states, inputs, t, cfg.horizon, scaling);
    const ActionDistribution dist = policy.forward(step_record.observation);

    if (selection == ActionSelection::Sample) {
      const SampledAction act = sample_action(dist, cfg.u_max, rng);
      step_record.raw_action = act.raw;
      step_record.applied = act.applied;
      step_record.log_prob = act.log_prob;
    } else {
      step_record.raw_action = dist.mean;
      step_record.applied.i1 = std::clamp(dist.mean[0], 0.0, cfg.u_max[0]);
      step_record.applied.i2 = std::clamp(dist.mean[1], 0.0, cfg.u_max[1]);
      step_record.log_prob = gaussian_log_prob(step_record.raw_action, dist);
    }

    step_record.next_state =
        step(states.back(), step_record.applied, model, cfg.integrator, rng);

    states.push_back(step_record.next_state);
    inputs.push_back(step_record.applied);
    traj.steps.push_back(std::move(step_record));
  }
  return traj;
}

EpisodeBatch run_batch(const PolicyNet& policy, const ModelParams& model, const RolloutConfig& cfg,
                       std::uint64_t epoch_seed, int n_mc) {
  if (n_mc < 2) {
    throw ConfigInvalid("run_batch needs n_mc >= 2");
  }

  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(n_mc));
  for (int k = 0; k < n_mc; ++k) {
    seeds[static_cast<std::size_t>(k)] = derive_seed(epoch_seed, static_cast<std::uint64_t>(k));
  }

  std::vector<std::optional<Trajectory>> slots(static_cast<std::size_t>(n_mc));
  const int n_threads = std::min(resolve_threads(cfg.n_threads), n_mc);

  auto worker = [&](int first) {
    for (int k = first; k < n_mc; k += n_threads) {
      try {
        slots[static_cast<std::size_t>(k)] =
            run_episode(policy, model, cfg, seeds[static_cast<std::size_t>(k)]);
      } catch (const NonFiniteState&) {
        // leave the slot empty; recorded as failed below
      }
    }
  };

  if (n_threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) {
      pool.emplace_back(worker, i);
    }
    for (auto& th : pool) {
      th.join();
    }
  }

  EpisodeBatch batch;
  batch.episodes.reserve(static_cast<std::size_t>(n_mc));
  for (int k = 0; k < n_mc; ++k) {
    auto& slot = slots[static_cast<std::size_t>(k)];
    if (slot.has_value()) {
      batch.episodes.push_back(std::move(*slot));
      batch.seeds.push_back(seeds[static_cast<std::size_t>(k)]);
    } else {
      batch.failed.emplace_back(k, seeds[static_cast<std::size_t>(k)]);
    }
  }
  if (10 * batch.failed.size() > static_cast<std::size_t>(n_mc)) {
    throw BatchDegenerate(std::to_string(batch.failed.size()) + " of " + std::to_string(n_mc) +
                          " episodes ended non-finite");
  }

  batch.returns.reserve(batch.episodes.size());
  for (const Trajectory& traj : batch.episodes) {
    batch.returns.push_back(episode_return(traj, cfg.ret));
  }
  return batch;
}

}  // namespace ccrl
