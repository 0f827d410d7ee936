#include "ccrl/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "ccrl/seeding.hpp"

namespace ccrl {

void TrainConfig::validate() const {
  if (n_epochs < 1) throw ConfigInvalid("train.n_epochs must be >= 1");
  if (n_mc < 2) throw ConfigInvalid("train.n_mc must be >= 2");
  if (!(learning_rate > 0.0)) throw ConfigInvalid("train.learning_rate must be > 0");
  if (!(baseline_epsilon > 0.0)) throw ConfigInvalid("train.baseline_epsilon must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigInvalid("train.beta1/beta2 must lie in [0, 1)");
  }
  if (!(moment_epsilon > 0.0)) throw ConfigInvalid("train.moment_epsilon must be > 0");
}

std::vector<double> normalize_returns(std::span<const double> returns, double epsilon) {
  if (returns.size() < 2) {
    throw LengthMismatch("normalize_returns needs at least 2 returns");
  }
  const double n = static_cast<double>(returns.size());
  double mean = 0.0;
  for (double j : returns) mean += j;
  mean /= n;
  double var = 0.0;
  for (double j : returns) var += (j - mean) * (j - mean);
  const double stdev = std::sqrt(var / n);

  std::vector<double> advantages(returns.size());
  for (std::size_t k = 0; k < returns.size(); ++k) {
    advantages[k] = (returns[k] - mean) / (stdev + epsilon);
  }
  return advantages;
}

Eigen::VectorXd estimate_gradient(const EpisodeBatch& batch, std::span<const double> advantages,
                                  const PolicyNet& policy, int n_threads) {
  if (batch.episodes.size() != advantages.size()) {
    throw LengthMismatch("batch and advantages are not aligned");
  }
  const int n_episodes = static_cast<int>(batch.episodes.size());
  const int n_params = policy.num_params();

  // Per-episode sum over time of grad log pi, one slot per episode so the
  // reduction below is order-independent of the thread schedule.
  std::vector<Eigen::VectorXd> per_episode(static_cast<std::size_t>(n_episodes));
  auto episode_grad = [&](int k) {
    const Trajectory& traj = batch.episodes[static_cast<std::size_t>(k)];
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n_params);
    for (const TrajectoryStep& st : traj.steps) {
      sum += policy.log_prob_grad(st.observation, st.raw_action);
    }
    per_episode[static_cast<std::size_t>(k)] = std::move(sum);
  };

  int threads = n_threads > 0 ? n_threads
                              : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n_episodes);
  if (threads <= 1) {
    for (int k = 0; k < n_episodes; ++k) episode_grad(k);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) {
      pool.emplace_back([&, i] {
        for (int k = i; k < n_episodes; k += threads) episode_grad(k);
      });
    }
    for (auto& th : pool) th.join();
  }

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(n_params);
  for (int k = 0; k < n_episodes; ++k) {
    grad += advantages[static_cast<std::size_t>(k)] * per_episode[static_cast<std::size_t>(k)];
  }
  grad /= static_cast<double>(n_episodes);
  return grad;
}

void update(PolicyNet& policy, const Eigen::VectorXd& gradient, const TrainConfig& cfg,
            OptimizerState& opt_state) {
  Eigen::VectorXd theta = policy.flatten();
  if (gradient.size() != theta.size()) {
    throw LengthMismatch("gradient length does not match the parameter count");
  }

  if (cfg.optimizer == OptimizerKind::PlainAscent) {
    theta += cfg.learning_rate * gradient;
  } else {
    if (opt_state.first_moment.size() != theta.size()) {
      opt_state.first_moment = Eigen::VectorXd::Zero(theta.size());
      opt_state.second_moment = Eigen::VectorXd::Zero(theta.size());
      opt_state.step = 0;
    }
    opt_state.step += 1;
    opt_state.first_moment =
        cfg.beta1 * opt_state.first_moment + (1.0 - cfg.beta1) * gradient;
    opt_state.second_moment = cfg.beta2 * opt_state.second_moment +
                              (1.0 - cfg.beta2) * gradient.cwiseProduct(gradient);
    const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(opt_state.step));
    const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(opt_state.step));
    const Eigen::VectorXd m_hat = opt_state.first_moment / bias1;
    const Eigen::VectorXd v_hat = opt_state.second_moment / bias2;
    theta += cfg.learning_rate *
             (m_hat.array() / (v_hat.array().sqrt() + cfg.moment_epsilon)).matrix();
  }
  policy.set_flat(theta);
}

TrainResult train(const TrainConfig& cfg, const RolloutConfig& rollout_cfg,
                  const ModelParams& model, const PolicyConfig& policy_cfg,
                  const EpochCallback& on_epoch) {
  cfg.validate();

  PolicyNet policy = PolicyNet::initialized(policy_cfg, derive_seed(cfg.master_seed, 0));
  OptimizerState opt_state;

  TrainResult result{policy, policy, -1, 0.0, {}};
  result.stats.reserve(static_cast<std::size_t>(cfg.n_epochs));

  for (int m = 0; m < cfg.n_epochs; ++m) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t epoch_seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(m) + 1);

    EpisodeBatch batch = run_batch(policy, model, rollout_cfg, epoch_seed, cfg.n_mc);
    const std::vector<double> advantages = normalize_returns(batch.returns, cfg.baseline_epsilon);
    const Eigen::VectorXd gradient =
        estimate_gradient(batch, advantages, policy, rollout_cfg.n_threads);

    EpochStats stats;
    stats.epoch = m;
    stats.min_return = *std::min_element(batch.returns.begin(), batch.returns.end());
    stats.max_return = *std::max_element(batch.returns.begin(), batch.returns.end());
    double mean = 0.0;
    for (double j : batch.returns) mean += j;
    mean /= static_cast<double>(batch.returns.size());
    double var = 0.0;
    for (double j : batch.returns) var += (j - mean) * (j - mean);
    stats.mean_return = mean;
    stats.std_return = std::sqrt(var / static_cast<double>(batch.returns.size()));
    stats.grad_norm = gradient.norm();

    // The batch was generated by the pre-update parameters, so those are the
    // ones checkpointed when this epoch is the best.
    if (result.best_epoch < 0 || mean > result.best_mean_return) {
      result.best_epoch = m;
      result.best_mean_return = mean;
      result.best_params = policy;
    }

    update(policy, gradient, cfg, opt_state);

    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.stats.push_back(stats);
    if (on_epoch) {
      on_epoch(stats);
    }
  }

  result.final_params = policy;
  return result;
}

}  // namespace ccrl
