#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ccrl/policy_net.hpp"

using namespace ccrl;

namespace {

Eigen::VectorXd random_obs(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd obs(PolicyNet::kObservationWidth);
  // roughly the magnitudes seen in rollouts: states O(1..100), inputs O(1), time O(1)
  const double scales[15] = {50, 2, 2, 0.05, 0.005, 3, 3, 50, 2, 2, 0.05, 0.005, 3, 3, 1};
  for (int i = 0; i < obs.size(); ++i) obs[i] = gauss(rng) * scales[i];
  return obs;
}

// Flattened-layout offsets for the fixed 15-[20x4]-(2,2) architecture.
constexpr int kTrunkSize = (15 * 20 + 20) + 3 * (20 * 20 + 20);
constexpr int kMeanHeadBegin = kTrunkSize;
constexpr int kMeanHeadEnd = kMeanHeadBegin + 2 * 20 + 2;

}  // namespace

TEST_CASE("zero-parameter network forward") {
  PolicyNet net(15, {20, 20, 20, 20}, 0.01, 1e-3);
  std::mt19937_64 rng(1);
  const Eigen::VectorXd obs = random_obs(rng);
  const ActionDistribution dist = net.forward(obs);
  CHECK(dist.mean[0] == 0.0);
  CHECK(dist.mean[1] == 0.0);
  CHECK(dist.std[0] == doctest::Approx(0.6941).epsilon(1e-4));
  CHECK(dist.std[1] == doctest::Approx(std::log(2.0) + 1e-3).epsilon(1e-12));
}

TEST_CASE("forward is deterministic and width-checked") {
  const PolicyNet net = PolicyNet::initialized(PolicyConfig{}, 7);
  std::mt19937_64 rng(2);
  const Eigen::VectorXd obs = random_obs(rng);
  const ActionDistribution d1 = net.forward(obs);
  const ActionDistribution d2 = net.forward(obs);
  CHECK(d1.mean == d2.mean);
  CHECK(d1.std == d2.std);
  CHECK_THROWS_AS(net.forward(Eigen::VectorXd::Zero(14)), IndexOutOfRange);
}

TEST_CASE("initialization layout") {
  PolicyConfig cfg;
  cfg.u_max = {10.0, 8.0};
  const PolicyNet net = PolicyNet::initialized(cfg, 3);
  // mean-head bias starts at u_max/4 per channel
  const ActionDistribution dist = net.forward(Eigen::VectorXd::Zero(15));
  CHECK(dist.mean[0] == doctest::Approx(10.0 / 4.0).epsilon(1e-15));
  CHECK(dist.mean[1] == doctest::Approx(8.0 / 4.0).epsilon(1e-15));
  // same seed, same parameters; different seed, different parameters
  CHECK(PolicyNet::initialized(cfg, 3).flatten() == net.flatten());
  CHECK(PolicyNet::initialized(cfg, 4).flatten() != net.flatten());
}

TEST_CASE("flatten/unflatten round-trips exactly") {
  const PolicyNet net = PolicyNet::initialized(PolicyConfig{}, 11);
  const Eigen::VectorXd theta = net.flatten();
  CHECK(theta.size() == 1664);

  PolicyNet other(15, {20, 20, 20, 20}, 0.01, 1e-3);
  other.set_flat(theta);
  CHECK(other.flatten() == theta);

  Eigen::VectorXd bumped = theta;
  bumped[123] += 0.5;
  other.set_flat(bumped);
  CHECK(other.flatten() == bumped);

  CHECK_THROWS_AS(other.set_flat(Eigen::VectorXd::Zero(10)), LengthMismatch);
}

TEST_CASE("std stays above the floor everywhere") {
  PolicyConfig cfg;
  cfg.std_floor = 0.05;
  cfg.std_head_bias_init = -30.0;  // softplus(-30) ~ 0
  const PolicyNet net = PolicyNet::initialized(cfg, 5);
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const ActionDistribution dist = net.forward(random_obs(rng));
    CHECK(dist.std[0] >= 0.05);
    CHECK(dist.std[1] >= 0.05);
  }
}

TEST_CASE("mean responds smoothly to a trunk weight perturbation") {
  const PolicyNet net = PolicyNet::initialized(PolicyConfig{}, 19);
  std::mt19937_64 rng(20);
  const Eigen::VectorXd obs = random_obs(rng);
  Eigen::VectorXd theta = net.flatten();

  PolicyNet probe = net;
  const int coord = 37;  // a first-layer weight
  auto mean_at = [&](double delta) {
    Eigen::VectorXd tp = theta;
    tp[coord] += delta;
    probe.set_flat(tp);
    return probe.forward(obs).mean;
  };
  const Eigen::Vector2d d_small = (mean_at(1e-6) - mean_at(-1e-6)) / 2e-6;
  const Eigen::Vector2d d_tiny = (mean_at(1e-7) - mean_at(-1e-7)) / 2e-7;
  for (int j = 0; j < 2; ++j) {
    CHECK(std::isfinite(d_small[j]));
    CHECK(d_small[j] == doctest::Approx(d_tiny[j]).epsilon(1e-3));
  }
}

TEST_CASE("trunk is piecewise linear: doubling the obs doubles the bias-free response") {
  const PolicyNet net = PolicyNet::initialized(PolicyConfig{}, 13);
  std::mt19937_64 rng(14);
  const Eigen::VectorXd obs = 1e-3 * random_obs(rng);  // small, keeps activation signs fixed
  const Eigen::Vector2d bias{10.0 / 4.0, 10.0 / 4.0};  // trunk biases are zero at init
  const Eigen::Vector2d m1 = net.forward(obs).mean - bias;
  const Eigen::Vector2d m2 = net.forward(2.0 * obs).mean - bias;
  CHECK(m2[0] == doctest::Approx(2.0 * m1[0]).epsilon(1e-12));
  CHECK(m2[1] == doctest::Approx(2.0 * m1[1]).epsilon(1e-12));
}

TEST_CASE("gaussian log density") {
  ActionDistribution dist;
  dist.mean << 1.0, -2.0;
  dist.std << 0.5, 2.0;

  SUBCASE("at the mode") {
    const double lp = gaussian_log_prob(dist.mean, dist);
    const double expected = -std::log(0.5) - std::log(2.0) - std::log(2.0 * M_PI);
    CHECK(lp == doctest::Approx(expected).epsilon(1e-14));
  }

  SUBCASE("one standard deviation out per channel") {
    Eigen::Vector2d raw = dist.mean + dist.std;
    const double lp = gaussian_log_prob(raw, dist);
    const double expected = -1.0 - std::log(0.5) - std::log(2.0) - std::log(2.0 * M_PI);
    CHECK(lp == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("action sampling") {
  ActionDistribution dist;
  dist.mean << 5.0, 5.0;
  dist.std << 1e-3, 1e-3;
  const std::array<double, 2> u_max{10.0, 10.0};

  SUBCASE("vanishing variance keeps applied equal to raw") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) {
      const SampledAction act = sample_action(dist, u_max, rng);
      CHECK(act.applied.i1 == act.raw[0]);
      CHECK(act.applied.i2 == act.raw[1]);
    }
  }

  SUBCASE("clamping to the box") {
    ActionDistribution wide;
    wide.mean << -5.0, 15.0;
    wide.std << 1e-3, 1e-3;
    std::mt19937_64 rng(2);
    const SampledAction act = sample_action(wide, u_max, rng);
    CHECK(act.applied.i1 == 0.0);
    CHECK(act.applied.i2 == 10.0);
    CHECK(act.raw[0] < 0.0);
    CHECK(act.raw[1] > 10.0);
    CHECK(std::isfinite(act.log_prob));
  }

  SUBCASE("seeded sampling is reproducible") {
    std::mt19937_64 r1(77), r2(77);
    const SampledAction a1 = sample_action(dist, u_max, r1);
    const SampledAction a2 = sample_action(dist, u_max, r2);
    CHECK(a1.raw == a2.raw);
    CHECK(a1.log_prob == a2.log_prob);
  }

  SUBCASE("empirical mean matches the distribution mean within 4 standard errors") {
    ActionDistribution d;
    d.mean << 2.0, -1.0;
    d.std << 0.7, 1.3;
    std::mt19937_64 rng(3);
    const int n = 100000;
    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    for (int i = 0; i < n; ++i) {
      sum += sample_action(d, u_max, rng).raw;
    }
    const Eigen::Vector2d emp = sum / n;
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(emp[j] - d.mean[j]) < 4.0 * d.std[j] / std::sqrt(double(n)));
    }
  }
}

TEST_CASE("log-prob gradient matches central finite differences") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> coord_dist(0, 1663);
  const double h = 1e-5;

  for (int trial = 0; trial < 10; ++trial) {
    PolicyConfig cfg;
    const PolicyNet net = PolicyNet::initialized(cfg, 1000 + trial);
    const Eigen::VectorXd obs = random_obs(rng);
    const ActionDistribution dist = net.forward(obs);
    Eigen::Vector2d raw;
    for (int j = 0; j < 2; ++j) raw[j] = dist.mean[j] + dist.std[j] * gauss(rng);

    const Eigen::VectorXd analytic = net.log_prob_grad(obs, raw);
    const Eigen::VectorXd theta = net.flatten();

    PolicyNet probe = net;
    for (int k = 0; k < 50; ++k) {
      const int i = coord_dist(rng);
      Eigen::VectorXd tp = theta;
      tp[i] = theta[i] + h;
      probe.set_flat(tp);
      const double up = probe.log_prob(obs, raw);
      tp[i] = theta[i] - h;
      probe.set_flat(tp);
      const double down = probe.log_prob(obs, raw);
      const double fd = (up - down) / (2.0 * h);
      // relative tolerance with an absolute floor: differences below 1e-8
      // are finite-difference cancellation noise, not gradient error
      const double bound = 1e-8 + 1e-4 * std::max(std::abs(analytic[i]), std::abs(fd));
      CHECK(std::abs(fd - analytic[i]) <= bound);
    }
  }
}

TEST_CASE("log-prob gradient full-coordinate sweep") {
  std::mt19937_64 rng(404);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 2; ++trial) {
    const PolicyNet net = PolicyNet::initialized(PolicyConfig{}, 50 + trial);
    const Eigen::VectorXd obs = random_obs(rng);
    const ActionDistribution dist = net.forward(obs);
    Eigen::Vector2d raw;
    for (int j = 0; j < 2; ++j) raw[j] = dist.mean[j] + dist.std[j] * gauss(rng);

    const Eigen::VectorXd analytic = net.log_prob_grad(obs, raw);
    const Eigen::VectorXd theta = net.flatten();
    PolicyNet probe = net;
    double worst = 0.0;
    for (int i = 0; i < theta.size(); ++i) {
      Eigen::VectorXd tp = theta;
      tp[i] = theta[i] + h;
      probe.set_flat(tp);
      const double up = probe.log_prob(obs, raw);
      tp[i] = theta[i] - h;
      probe.set_flat(tp);
      const double down = probe.log_prob(obs, raw);
      const double fd = (up - down) / (2.0 * h);
      const double excess = std::abs(fd - analytic[i]) - 1e-8;
      worst = std::max(worst, excess / std::max({std::abs(analytic[i]), std::abs(fd), 1e-30}));
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("score at the mode has no mean-head component") {
  const PolicyNet net = PolicyNet::initialized(PolicyConfig{}, 31);
  std::mt19937_64 rng(32);
  const Eigen::VectorXd obs = random_obs(rng);
  const Eigen::Vector2d mode = net.forward(obs).mean;
  const Eigen::VectorXd grad = net.log_prob_grad(obs, mode);
  for (int i = kMeanHeadBegin; i < kMeanHeadEnd; ++i) {
    CHECK(grad[i] == 0.0);
  }
  // the sigma path still contributes
  CHECK(grad.norm() > 0.0);
}
