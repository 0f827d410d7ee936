#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ccrl/return_functions.hpp"

using namespace ccrl;

namespace {

// Trajectory whose post-action states follow the given biomass pairs.
Trajectory trajectory_with_biomass(const std::vector<std::pair<double, double>>& biomass) {
  Trajectory traj;
  traj.initial_state = SystemState{5.5, 0.005, 0.005, 0.0, 0.0};
  for (const auto& [b1, b2] : biomass) {
    TrajectoryStep step;
    step.observation = Eigen::VectorXd::Zero(15);
    step.raw_action = Eigen::Vector2d::Zero();
    step.next_state = SystemState{100.0, b1, b2, 1e-3, 1e-4};
    traj.steps.push_back(step);
  }
  return traj;
}

}  // namespace

TEST_CASE("squared error") {
  CHECK(squared_error(3.0, 3.0) == 0.0);
  CHECK(squared_error(0.0, 3.0) == 9.0);
  for (double delta : {0.1, 0.5, 2.0}) {
    CHECK(squared_error(3.0 + delta, 3.0) == squared_error(3.0 - delta, 3.0));
  }
}

TEST_CASE("saturation stage reward") {
  ReturnConfig cfg = ReturnConfig::preset("case3", 18);
  CHECK(cfg.beta_e1 == 9.0);

  CHECK(saturation_stage(0.0, 0.0, cfg) == cfg.beta_vmax);
  CHECK(saturation_stage(cfg.beta_e1, 0.0, cfg) == doctest::Approx(cfg.beta_vmax / 2.0));
  CHECK(saturation_stage(9.0, 9.0, cfg) == doctest::Approx(0.25));

  SUBCASE("strictly decreasing in each error") {
    double prev = saturation_stage(0.0, 1.0, cfg);
    for (double e1 : {0.5, 1.0, 4.0, 30.0}) {
      const double q = saturation_stage(e1, 1.0, cfg);
      CHECK(q < prev);
      prev = q;
    }
  }

  SUBCASE("maximum only at simultaneous satisfaction") {
    CHECK(saturation_stage(1e-9, 0.0, cfg) < cfg.beta_vmax);
    CHECK(saturation_stage(0.0, 1e-9, cfg) < cfg.beta_vmax);
  }
}

TEST_CASE("diminished gains: improving one setpoint pays less the further the other is off") {
  const double delta = 0.25;
  for (const char* name : {"case2", "case3", "case4"}) {
    const ReturnConfig cfg = ReturnConfig::preset(name, 18);
    for (int i = 1; i <= 20; ++i) {
      const double e1 = delta + 2.0 * i;
      double prev_gain = std::numeric_limits<double>::infinity();
      for (int j = 0; j < 20; ++j) {
        const double e2 = 0.5 * j;
        const double gain =
            saturation_stage(e1 - delta, e2, cfg) - saturation_stage(e1, e2, cfg);
        CHECK(gain > 0.0);
        CHECK(gain < prev_gain);
        prev_gain = gain;
      }
    }
  }
}

TEST_CASE("steepness ordering of the single-factor value across presets") {
  for (double e : {0.5, 3.0, 9.0, 40.0}) {
    const double f2 = 3.0 / (3.0 + e);
    const double f3 = 9.0 / (9.0 + e);
    const double f4 = 27.0 / (27.0 + e);
    CHECK(f2 < f3);
    CHECK(f3 < f4);
  }
}

TEST_CASE("episode return") {
  SUBCASE("perfect tracking under the saturation design sums the weights") {
    const ReturnConfig cfg = ReturnConfig::preset("case3", 18);
    const Trajectory traj =
        trajectory_with_biomass(std::vector<std::pair<double, double>>(18, {3.0, 3.0}));
    CHECK(episode_return(traj, cfg) == 19.0);
  }

  SUBCASE("perfect tracking under the quadratic design is zero") {
    const ReturnConfig cfg = ReturnConfig::preset("case1", 18);
    const Trajectory traj =
        trajectory_with_biomass(std::vector<std::pair<double, double>>(18, {3.0, 3.0}));
    CHECK(episode_return(traj, cfg) == 0.0);
  }

  SUBCASE("quadratic with one weight zeroed ignores that species") {
    ReturnConfig cfg = ReturnConfig::preset("case1", 3);
    cfg.w2 = 0.0;
    const Trajectory a = trajectory_with_biomass({{2.0, 0.1}, {2.5, 7.0}, {3.0, 0.0}});
    const Trajectory b = trajectory_with_biomass({{2.0, 3.0}, {2.5, 3.0}, {3.0, 3.0}});
    CHECK(episode_return(a, cfg) == episode_return(b, cfg));
    CHECK(episode_return(a, cfg) == doctest::Approx(-(1.0 + 0.25)));
  }

  SUBCASE("quadratic return is the negated weighted error sum") {
    ReturnConfig cfg = ReturnConfig::preset("case1", 2);
    cfg.w1 = 2.0;
    cfg.w2 = 0.5;
    const Trajectory traj = trajectory_with_biomass({{4.0, 1.0}, {3.0, 5.0}});
    // t=1: 2*(1)^2 + 0.5*(2)^2 = 4; t=2: 0 + 0.5*4 = 2
    CHECK(episode_return(traj, cfg) == doctest::Approx(-6.0));
  }

  SUBCASE("terminal weight applies to the last state only") {
    ReturnConfig cfg = ReturnConfig::preset("case3", 2);
    cfg.terminal_weight = 5.0;
    const Trajectory traj = trajectory_with_biomass({{3.0, 3.0}, {3.0, 3.0}});
    CHECK(episode_return(traj, cfg) == doctest::Approx(1.0 + 5.0));
  }

  SUBCASE("length mismatch is rejected") {
    const ReturnConfig cfg = ReturnConfig::preset("case3", 18);
    const Trajectory traj =
        trajectory_with_biomass(std::vector<std::pair<double, double>>(17, {3.0, 3.0}));
    CHECK_THROWS_AS(episode_return(traj, cfg), LengthMismatch);
  }

  SUBCASE("saturation return never exceeds the weighted bound") {
    const ReturnConfig cfg = ReturnConfig::preset("case2", 6);
    std::vector<std::pair<double, double>> biomass;
    for (int t = 0; t < 6; ++t) biomass.push_back({0.5 * t, 6.0 - t});
    const Trajectory traj = trajectory_with_biomass(biomass);
    const double bound = 5.0 * cfg.beta_vmax + cfg.terminal_weight * cfg.beta_vmax;
    CHECK(episode_return(traj, cfg) < bound);
  }
}

TEST_CASE("presets") {
  const ReturnConfig c1 = ReturnConfig::preset("case1", 18);
  CHECK(c1.kind == ReturnKind::Quadratic);
  CHECK(c1.w1 == 1.0);
  CHECK(c1.w2 == 1.0);
  CHECK(c1.b1_star == 3.0);
  CHECK(c1.b2_star == 3.0);

  const double betas[3] = {3.0, 9.0, 27.0};
  const char* names[3] = {"case2", "case3", "case4"};
  for (int i = 0; i < 3; ++i) {
    const ReturnConfig cfg = ReturnConfig::preset(names[i], 18);
    CHECK(cfg.kind == ReturnKind::Saturation);
    CHECK(cfg.beta_e1 == betas[i]);
    CHECK(cfg.beta_e2 == betas[i]);
    CHECK(cfg.beta_vmax == 1.0);
    CHECK(cfg.stage_weights.size() == 17);
    for (double w : cfg.stage_weights) CHECK(w == 1.0);
    CHECK(cfg.terminal_weight == 2.0);
  }

  CHECK_THROWS_AS(ReturnConfig::preset("case5", 18), ConfigInvalid);
}

TEST_CASE("return config validation") {
  ReturnConfig cfg = ReturnConfig::preset("case3", 18);
  cfg.stage_weights.resize(10);
  CHECK_THROWS_AS(cfg.validate(), ConfigInvalid);

  cfg = ReturnConfig::preset("case3", 18);
  cfg.beta_e2 = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigInvalid);

  cfg = ReturnConfig::preset("case1", 18);
  cfg.w1 = -0.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigInvalid);
}
