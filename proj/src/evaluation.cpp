#include "ccrl/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "ccrl/seeding.hpp"

namespace ccrl {

namespace {

EvaluationResult::Series summarize(const std::vector<std::vector<double>>& per_time) {
  EvaluationResult::Series out;
  out.mean.reserve(per_time.size());
  out.stdev.reserve(per_time.size());
  for (const auto& values : per_time) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    out.mean.push_back(mean);
    out.stdev.push_back(std::sqrt(var / static_cast<double>(values.size())));
  }
  return out;
}

}  // namespace

EvaluationResult evaluate_policy(const PolicyNet& policy, const ModelParams& model,
                                 const RolloutConfig& cfg, int n_episodes, std::uint64_t seed,
                                 bool deterministic, int final_window_hours,
                                 int growth_window_hours) {
  if (n_episodes < 1) {
    throw ConfigInvalid("evaluation needs n_episodes >= 1");
  }
  const int t_f = cfg.horizon;

  EvaluationResult result;
  result.n_episodes = n_episodes;
  result.deterministic = deterministic;
  result.final_window_hours = final_window_hours;
  result.growth_window_hours = growth_window_hours;
  result.episodes.reserve(static_cast<std::size_t>(n_episodes));

  const auto selection = deterministic ? ActionSelection::Mean : ActionSelection::Sample;
  for (int k = 0; k < n_episodes; ++k) {
    result.episodes.push_back(
        run_episode(policy, model, cfg, derive_seed(seed, static_cast<std::uint64_t>(k)),
                    selection));
  }

  // Collect per-time samples across episodes.
  auto state_series = [&](auto pick) {
    std::vector<std::vector<double>> per_time(static_cast<std::size_t>(t_f) + 1);
    for (const Trajectory& traj : result.episodes) {
      for (int t = 0; t <= t_f; ++t) {
        per_time[static_cast<std::size_t>(t)].push_back(pick(traj.state_at(t)));
      }
    }
    return summarize(per_time);
  };
  result.s = state_series([](const SystemState& x) { return x.s; });
  result.b1 = state_series([](const SystemState& x) { return x.b1; });
  result.b2 = state_series([](const SystemState& x) { return x.b2; });
  result.a1 = state_series([](const SystemState& x) { return x.a1; });
  result.a2 = state_series([](const SystemState& x) { return x.a2; });
  result.mu1 = state_series([&](const SystemState& x) { return growth_rate(x, model, 0); });
  result.mu2 = state_series([&](const SystemState& x) { return growth_rate(x, model, 1); });

  auto input_series = [&](auto pick) {
    std::vector<std::vector<double>> per_time(static_cast<std::size_t>(t_f));
    for (const Trajectory& traj : result.episodes) {
      for (int t = 0; t < t_f; ++t) {
        per_time[static_cast<std::size_t>(t)].push_back(
            pick(traj.steps[static_cast<std::size_t>(t)].applied));
      }
    }
    return summarize(per_time);
  };
  result.i1 = input_series([](const LightInput& u) { return u.i1; });
  result.i2 = input_series([](const LightInput& u) { return u.i2; });

  double mean_return = 0.0;
  for (const Trajectory& traj : result.episodes) {
    mean_return += episode_return(traj, cfg.ret);
  }
  result.mean_return = mean_return / static_cast<double>(n_episodes);

  const std::array<double, 2> setpoints{cfg.ret.b1_star, cfg.ret.b2_star};
  for (int i = 0; i < 2; ++i) {
    double terminal = 0.0;
    for (const Trajectory& traj : result.episodes) {
      terminal += std::abs(traj.state_at(t_f).biomass(i) - setpoints[static_cast<std::size_t>(i)]);
    }
    result.terminal_abs_error[static_cast<std::size_t>(i)] =
        terminal / static_cast<double>(n_episodes);

    double window = 0.0;
    int count = 0;
    for (const Trajectory& traj : result.episodes) {
      for (int t = std::max(0, t_f - final_window_hours); t <= t_f; ++t) {
        window += std::abs(traj.state_at(t).biomass(i) - setpoints[static_cast<std::size_t>(i)]);
        ++count;
      }
    }
    result.final_window_abs_error[static_cast<std::size_t>(i)] = window / count;

    double growth = 0.0;
    count = 0;
    for (const Trajectory& traj : result.episodes) {
      for (int t = std::max(0, t_f - growth_window_hours); t <= t_f; ++t) {
        growth += std::abs(growth_rate(traj.state_at(t), model, i) - model.d_l);
        ++count;
      }
    }
    result.final_growth_deviation[static_cast<std::size_t>(i)] = growth / count;
  }

  return result;
}

}  // namespace ccrl
