#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "ccrl/dynamics.hpp"

namespace ccrl {

struct PolicyConfig {
  std::vector<int> hidden_widths{20, 20, 20, 20};
  double leaky_slope = 0.01;
  double std_floor = 1e-3;                 // lower bound on each std component
  std::array<double, 2> u_max{10.0, 10.0};
  double head_init_scale = 1e-2;           // uniform bound for head weight init
  double std_head_bias_init = 0.0;         // initial std is softplus(this) + std_floor
};

struct ActionDistribution {
  Eigen::Vector2d mean;  // action units
  Eigen::Vector2d std;   // action units, each >= std_floor
};

struct SampledAction {
  Eigen::Vector2d raw;  // Gaussian draw, may be negative or exceed u_max
  LightInput applied;   // raw clamped to [0, u_max] per channel
  double log_prob;      // log-density of raw under the distribution
};

// Gaussian stochastic control policy: an MLP trunk with LeakyReLU activations
// feeding two linear heads, one for the action means and one (through a
// softplus plus a floor) for the standard deviations. All evaluation methods
// are pure; parameters only change through set_flat.
class PolicyNet {
 public:
  static constexpr int kObservationWidth = 15;
  static constexpr int kActionDim = 2;

  PolicyNet(int input_width, std::vector<int> hidden_widths, double leaky_slope, double std_floor);

  // Fresh parameters: He-style uniform fan-in init for the trunk, small
  // uniform weights for both heads, mean-head bias at u_max/4 per channel.
  static PolicyNet initialized(const PolicyConfig& cfg, std::uint64_t seed,
                               int input_width = kObservationWidth);

  ActionDistribution forward(const Eigen::VectorXd& obs) const;

  double log_prob(const Eigen::VectorXd& obs, const Eigen::Vector2d& raw_action) const;

  // Exact reverse-mode gradient of log pi(raw_action | obs) with respect to
  // the flattened parameter vector.
  Eigen::VectorXd log_prob_grad(const Eigen::VectorXd& obs, const Eigen::Vector2d& raw_action) const;

  // Flattened parameter view. Order: each trunk layer's weight matrix row by
  // row then its bias, then the mean head (same layout), then the std head.
  Eigen::VectorXd flatten() const;
  void set_flat(const Eigen::VectorXd& theta);
  int num_params() const { return n_params_; }

  int input_width() const { return input_width_; }
  const std::vector<int>& hidden_widths() const { return hidden_widths_; }
  double leaky_slope() const { return leaky_slope_; }
  double std_floor() const { return std_floor_; }

 private:
  int input_width_;
  std::vector<int> hidden_widths_;
  double leaky_slope_;
  double std_floor_;
  int n_params_;

  std::vector<Eigen::MatrixXd> trunk_w_;  // out x in
  std::vector<Eigen::VectorXd> trunk_b_;
  Eigen::MatrixXd mean_w_, std_w_;        // kActionDim x last hidden width
  Eigen::VectorXd mean_b_, std_b_;
};

double gaussian_log_prob(const Eigen::Vector2d& raw, const ActionDistribution& dist);

// Draws raw ~ N(mean, diag(std^2)) and clamps per channel into [0, u_max].
// log_prob is evaluated at the raw (unclamped) draw.
SampledAction sample_action(const ActionDistribution& dist, const std::array<double, 2>& u_max,
                            std::mt19937_64& rng);

double softplus(double x);

}  // namespace ccrl
