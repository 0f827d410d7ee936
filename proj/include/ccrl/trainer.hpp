#pragma once

#include <functional>
#include <span>

#include "ccrl/rollout.hpp"

namespace ccrl {

enum class OptimizerKind { PlainAscent, AdaptiveMoments };

struct TrainConfig {
  int n_epochs = 350;
  int n_mc = 500;
  double learning_rate = 1e-3;      // alpha
  double baseline_epsilon = 1e-8;   // epsilon in the return standardization
  OptimizerKind optimizer = OptimizerKind::PlainAscent;
  std::uint64_t master_seed = 1;

  // AdaptiveMoments constants
  double beta1 = 0.9;
  double beta2 = 0.999;
  double moment_epsilon = 1e-8;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double mean_return = 0.0;
  double std_return = 0.0;  // population std across the batch
  double min_return = 0.0;
  double max_return = 0.0;
  double grad_norm = 0.0;
  double seconds = 0.0;  // wall time; excluded from the deterministic stats CSV
};

struct OptimizerState {
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
  long step = 0;
};

// advantage_k = (J_k - mean(J)) / (pop_std(J) + epsilon); mean of the output
// is ~0 and constant batches map to all zeros.
std::vector<double> normalize_returns(std::span<const double> returns, double epsilon);

// g = (1/N) sum_k advantage_k * sum_t grad log pi(raw_t^k | obs_t^k), with N
// the number of episodes in the batch. Per-episode sums may be computed
// concurrently; the reduction over episodes runs in fixed index order.
Eigen::VectorXd estimate_gradient(const EpisodeBatch& batch, std::span<const double> advantages,
                                  const PolicyNet& policy, int n_threads = 1);

// Gradient-ascent parameter update. PlainAscent: theta += alpha * g.
// AdaptiveMoments: Adam-style moment estimates applied in the ascent
// direction.
void update(PolicyNet& policy, const Eigen::VectorXd& gradient, const TrainConfig& cfg,
            OptimizerState& opt_state);

struct TrainResult {
  PolicyNet best_params;   // parameters of the epoch with the highest mean return
  PolicyNet final_params;  // parameters after the last update
  int best_epoch = -1;
  double best_mean_return = 0.0;
  std::vector<EpochStats> stats;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Full policy-gradient loop: rollout batch -> returns -> standardized
// advantages -> gradient estimate -> ascent update, for cfg.n_epochs epochs.
// Epoch m uses seed derive_seed(master_seed, m + 1); the policy is
// initialized from derive_seed(master_seed, 0). Ties in the best-epoch mean
// break toward the earliest epoch.
TrainResult train(const TrainConfig& cfg, const RolloutConfig& rollout_cfg,
                  const ModelParams& model, const PolicyConfig& policy_cfg,
                  const EpochCallback& on_epoch = {});

}  // namespace ccrl
