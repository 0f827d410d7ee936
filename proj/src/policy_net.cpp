#include "ccrl/policy_net.hpp"

#include <cmath>

#include "ccrl/errors.hpp"

namespace ccrl {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2*pi)

// Row-major fill with U(-bound, bound); the draw order is part of the
// reproducibility contract of PolicyNet::initialized.
void fill_uniform(Eigen::MatrixXd& m, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-bound, bound);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = u(rng);
    }
  }
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

PolicyNet::PolicyNet(int input_width, std::vector<int> hidden_widths, double leaky_slope,
                     double std_floor)
    : input_width_(input_width),
      hidden_widths_(std::move(hidden_widths)),
      leaky_slope_(leaky_slope),
      std_floor_(std_floor) {
  if (input_width_ < 1 || hidden_widths_.empty()) {
    throw ConfigInvalid("policy architecture needs a positive input width and >= 1 hidden layer");
  }
  int in = input_width_;
  n_params_ = 0;
  for (int width : hidden_widths_) {
    if (width < 1) {
      throw ConfigInvalid("policy.hidden_widths entries must be >= 1");
    }
    trunk_w_.emplace_back(Eigen::MatrixXd::Zero(width, in));
    trunk_b_.emplace_back(Eigen::VectorXd::Zero(width));
    n_params_ += width * in + width;
    in = width;
  }
  mean_w_ = Eigen::MatrixXd::Zero(kActionDim, in);
  mean_b_ = Eigen::VectorXd::Zero(kActionDim);
  std_w_ = Eigen::MatrixXd::Zero(kActionDim, in);
  std_b_ = Eigen::VectorXd::Zero(kActionDim);
  n_params_ += 2 * (kActionDim * in + kActionDim);
}

PolicyNet PolicyNet::initialized(const PolicyConfig& cfg, std::uint64_t seed, int input_width) {
  PolicyNet net(input_width, cfg.hidden_widths, cfg.leaky_slope, cfg.std_floor);
  std::mt19937_64 rng(seed);
  for (auto& w : net.trunk_w_) {
    fill_uniform(w, std::sqrt(6.0 / static_cast<double>(w.cols())), rng);
  }
  fill_uniform(net.mean_w_, cfg.head_init_scale, rng);
  fill_uniform(net.std_w_, cfg.head_init_scale, rng);
  net.mean_b_ << cfg.u_max[0] / 4.0, cfg.u_max[1] / 4.0;
  net.std_b_.setConstant(cfg.std_head_bias_init);
  return net;
}

ActionDistribution PolicyNet::forward(const Eigen::VectorXd& obs) const {
  if (obs.size() != input_width_) {
    throw IndexOutOfRange("observation width " + std::to_string(obs.size()) +
                          " does not match policy input width " + std::to_string(input_width_));
  }
  Eigen::VectorXd h = obs;
  for (std::size_t l = 0; l < trunk_w_.size(); ++l) {
    Eigen::VectorXd z = trunk_w_[l] * h + trunk_b_[l];
    h = z.unaryExpr([s = leaky_slope_](double v) { return v > 0.0 ? v : s * v; });
  }
  ActionDistribution dist;
  dist.mean = mean_w_ * h + mean_b_;
  const Eigen::Vector2d pre = std_w_ * h + std_b_;
  dist.std = pre.unaryExpr([f = std_floor_](double v) { return softplus(v) + f; });
  return dist;
}

double gaussian_log_prob(const Eigen::Vector2d& raw, const ActionDistribution& dist) {
  double lp = 0.0;
  for (int j = 0; j < 2; ++j) {
    const double z = (raw[j] - dist.mean[j]) / dist.std[j];
    lp += -0.5 * z * z - std::log(dist.std[j]) - 0.5 * kLog2Pi;
  }
  return lp;
}

double PolicyNet::log_prob(const Eigen::VectorXd& obs, const Eigen::Vector2d& raw_action) const {
  return gaussian_log_prob(raw_action, forward(obs));
}

Eigen::VectorXd PolicyNet::log_prob_grad(const Eigen::VectorXd& obs,
                                         const Eigen::Vector2d& raw_action) const {
  if (obs.size() != input_width_) {
    throw IndexOutOfRange("observation width does not match policy input width");
  }
  const std::size_t n_layers = trunk_w_.size();

  // Forward pass, keeping pre- and post-activations.
  std::vector<Eigen::VectorXd> hs(n_layers + 1);
  std::vector<Eigen::VectorXd> zs(n_layers);
  hs[0] = obs;
  for (std::size_t l = 0; l < n_layers; ++l) {
    zs[l] = trunk_w_[l] * hs[l] + trunk_b_[l];
    hs[l + 1] = zs[l].unaryExpr([s = leaky_slope_](double v) { return v > 0.0 ? v : s * v; });
  }
  const Eigen::VectorXd& top = hs[n_layers];
  const Eigen::Vector2d mean = mean_w_ * top + mean_b_;
  const Eigen::Vector2d pre = std_w_ * top + std_b_;
  Eigen::Vector2d std_v;
  for (int j = 0; j < 2; ++j) std_v[j] = softplus(pre[j]) + std_floor_;

  // d logp / d mean and d logp / d std, then back through softplus.
  Eigen::Vector2d d_mean, d_pre;
  for (int j = 0; j < 2; ++j) {
    const double diff = raw_action[j] - mean[j];
    const double var = std_v[j] * std_v[j];
    d_mean[j] = diff / var;
    const double d_std = diff * diff / (var * std_v[j]) - 1.0 / std_v[j];
    d_pre[j] = d_std * sigmoid(pre[j]);
  }

  Eigen::VectorXd grad(n_params_);
  // Head gradients are written at their flattened offsets; trunk gradients
  // are filled on the way back down.
  int trunk_size = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    trunk_size += static_cast<int>(trunk_w_[l].size() + trunk_b_[l].size());
  }
  int offset = trunk_size;
  const int top_width = static_cast<int>(top.size());
  for (int r = 0; r < 2; ++r) {
    grad.segment(offset + r * top_width, top_width) = d_mean[r] * top.transpose();
  }
  grad.segment(offset + 2 * top_width, 2) = d_mean;
  offset += 2 * top_width + 2;
  for (int r = 0; r < 2; ++r) {
    grad.segment(offset + r * top_width, top_width) = d_pre[r] * top.transpose();
  }
  grad.segment(offset + 2 * top_width, 2) = d_pre;

  Eigen::VectorXd d_h = mean_w_.transpose() * d_mean + std_w_.transpose() * d_pre;
  offset = trunk_size;
  for (int l = static_cast<int>(n_layers) - 1; l >= 0; --l) {
    const Eigen::VectorXd d_z = d_h.array() *
        zs[l].unaryExpr([s = leaky_slope_](double v) { return v > 0.0 ? 1.0 : s; }).array();
    const int rows = static_cast<int>(trunk_w_[l].rows());
    const int cols = static_cast<int>(trunk_w_[l].cols());
    offset -= rows * cols + rows;
    for (int r = 0; r < rows; ++r) {
      grad.segment(offset + r * cols, cols) = d_z[r] * hs[l].transpose();
    }
    grad.segment(offset + rows * cols, rows) = d_z;
    d_h = trunk_w_[l].transpose() * d_z;
  }
  return grad;
}

Eigen::VectorXd PolicyNet::flatten() const {
  Eigen::VectorXd theta(n_params_);
  int offset = 0;
  auto pack = [&](const Eigen::MatrixXd& w, const Eigen::VectorXd& b) {
    const int rows = static_cast<int>(w.rows());
    const int cols = static_cast<int>(w.cols());
    for (int r = 0; r < rows; ++r) {
      theta.segment(offset + r * cols, cols) = w.row(r).transpose();
    }
    offset += rows * cols;
    theta.segment(offset, rows) = b;
    offset += rows;
  };
  for (std::size_t l = 0; l < trunk_w_.size(); ++l) pack(trunk_w_[l], trunk_b_[l]);
  pack(mean_w_, mean_b_);
  pack(std_w_, std_b_);
  return theta;
}

void PolicyNet::set_flat(const Eigen::VectorXd& theta) {
  if (theta.size() != n_params_) {
    throw LengthMismatch("flattened parameter vector has length " + std::to_string(theta.size()) +
                         ", expected " + std::to_string(n_params_));
  }
  int offset = 0;
  auto unpack = [&](Eigen::MatrixXd& w, Eigen::VectorXd& b) {
    const int rows = static_cast<int>(w.rows());
    const int cols = static_cast<int>(w.cols());
    for (int r = 0; r < rows; ++r) {
      w.row(r) = theta.segment(offset + r * cols, cols).transpose();
    }
    offset += rows * cols;
    b = theta.segment(offset, rows);
    offset += rows;
  };
  for (std::size_t l = 0; l < trunk_w_.size(); ++l) unpack(trunk_w_[l], trunk_b_[l]);
  unpack(mean_w_, mean_b_);
  unpack(std_w_, std_b_);
}

SampledAction sample_action(const ActionDistribution& dist, const std::array<double, 2>& u_max,
                            std::mt19937_64& rng) {
  SampledAction act;
  for (int j = 0; j < 2; ++j) {
    std::normal_distribution<double> gauss(dist.mean[j], dist.std[j]);
    act.raw[j] = gauss(rng);
  }
  act.applied.i1 = std::min(std::max(act.raw[0], 0.0), u_max[0]);
  act.applied.i2 = std::min(std::max(act.raw[1], 0.0), u_max[1]);
  act.log_prob = gaussian_log_prob(act.raw, dist);
  return act;
}

}  // namespace ccrl
