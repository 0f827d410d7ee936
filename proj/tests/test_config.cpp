#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "ccrl/artifacts.hpp"
#include "ccrl/checkpoint.hpp"
#include "ccrl/config.hpp"

using namespace ccrl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ccrl-test-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("defaults carry the case-study protocol") {
  const ExperimentConfig cfg = ExperimentConfig::defaults();
  CHECK_NOTHROW(cfg.validate());

  CHECK(cfg.model.mu_max[0] == 0.982);
  CHECK(cfg.model.k_s[0] == 2.964e-4);
  CHECK(cfg.model.f_c == 1100.0);
  CHECK(cfg.model.k_a[0] == 1.7);
  CHECK(cfg.model.k_a[1] == 0.182);
  CHECK(cfg.model.y_sb[0] == 10.18);
  CHECK(cfg.model.q_a_max[0] == 0.337);
  CHECK(cfg.model.q_a_max[1] == 0.036);
  CHECK(cfg.model.hill_n[0] == 2.0);
  CHECK(cfg.model.hill_n[1] == 4.865);
  CHECK(cfg.model.k_i[0] == 1.052);
  CHECK(cfg.model.k_i[1] == 1.34);
  CHECK(cfg.model.d_l == 0.15);
  CHECK(cfg.model.s_in == 200.0);

  CHECK(cfg.initial_state.s == 5.5);
  CHECK(cfg.initial_state.b1 == 0.005);
  CHECK(cfg.initial_state.b2 == 0.005);
  CHECK(cfg.initial_state.a1 == 1.545e-2);
  CHECK(cfg.initial_state.a2 == 1.655e-3);

  CHECK(cfg.horizon == 18);
  CHECK(cfg.train.n_epochs == 350);
  CHECK(cfg.train.n_mc == 500);
  CHECK(cfg.train.learning_rate == 0.001);
  CHECK(cfg.policy.hidden_widths == std::vector<int>{20, 20, 20, 20});
  CHECK(cfg.ret.kind == ReturnKind::Saturation);
}

TEST_CASE("config round-trips through JSON") {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  cfg.integrator.noise_std = std::array<double, 5>{0.1, 0.0, 0.0, 0.0, 0.0};
  cfg.obs_scaling = ObsScaling{{0.01, 0.5, 0.5, 10.0, 100.0}, {0.0, 3.0, 3.0, 0.0, 0.0}};
  cfg.train.optimizer = OptimizerKind::AdaptiveMoments;

  const nlohmann::json doc = cfg.to_json();
  const ExperimentConfig parsed = ExperimentConfig::from_json(doc);
  CHECK(parsed.to_json() == doc);
}

TEST_CASE("return presets and validation inside configs") {
  SUBCASE("preset expansion") {
    const auto cfg = ExperimentConfig::from_json({{"return", {{"preset", "case2"}}}});
    CHECK(cfg.ret.kind == ReturnKind::Saturation);
    CHECK(cfg.ret.beta_e1 == 3.0);
    CHECK(cfg.ret.stage_weights.size() == 17);
  }

  SUBCASE("missing beta_e for the saturation kind is named") {
    const nlohmann::json doc = {{"return", {{"kind", "saturation"}, {"beta_e2", 9.0}}}};
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(doc),
                         "config field 'return.beta_e1' is required for the saturation kind",
                         ConfigInvalid);
  }

  SUBCASE("unknown keys are rejected with their path") {
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_json({{"modle", nlohmann::json::object()}}),
                         "config field '(root).modle' is not a recognized field", ConfigInvalid);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"train", {{"nepochs", 3}}}}), ConfigInvalid);
  }

  SUBCASE("preset plus extra keys is rejected") {
    const nlohmann::json doc = {{"return", {{"preset", "case3"}, {"beta_e1", 4.0}}}};
    CHECK_THROWS_AS(ExperimentConfig::from_json(doc), ConfigInvalid);
  }

  SUBCASE("stage weight count must match the horizon") {
    nlohmann::json doc;
    doc["horizon"] = 6;
    doc["return"] = {{"kind", "saturation"},
                     {"beta_e1", 9.0},
                     {"beta_e2", 9.0},
                     {"stage_weights", {1.0, 1.0, 1.0}}};
    CHECK_THROWS_AS(ExperimentConfig::from_json(doc), ConfigInvalid);
  }
}

TEST_CASE("dotted-path overrides") {
  nlohmann::json doc = nlohmann::json::object();
  apply_override(doc, "train.n_epochs=1");
  apply_override(doc, "train.optimizer=adaptive_moments");
  apply_override(doc, "policy.u_max=[0.3,1.0]");
  apply_override(doc, "return.preset=case1");
  CHECK(doc["train"]["n_epochs"] == 1);
  CHECK(doc["train"]["optimizer"] == "adaptive_moments");
  CHECK(doc["policy"]["u_max"][1] == 1.0);

  const ExperimentConfig cfg = ExperimentConfig::from_json(doc);
  CHECK(cfg.train.n_epochs == 1);
  CHECK(cfg.train.optimizer == OptimizerKind::AdaptiveMoments);
  CHECK(cfg.ret.kind == ReturnKind::Quadratic);

  CHECK_THROWS_AS(apply_override(doc, "no-equals-sign"), ConfigInvalid);
  CHECK_THROWS_AS(apply_override(doc, "=5"), ConfigInvalid);
  CHECK_THROWS_AS(apply_override(doc, "train..n=1"), ConfigInvalid);
}

TEST_CASE("config file loading") {
  TempDir tmp;
  const fs::path path = tmp.path / "config.json";
  {
    std::ofstream out(path);
    out << R"({"horizon": 6, "return": {"preset": "case4"}, "train": {"n_epochs": 2, "n_mc": 4}})";
  }
  const ExperimentConfig cfg = ExperimentConfig::load(path, {"train.n_mc=8"});
  CHECK(cfg.horizon == 6);
  CHECK(cfg.ret.beta_e1 == 27.0);
  CHECK(cfg.ret.stage_weights.size() == 5);
  CHECK(cfg.train.n_mc == 8);

  CHECK_THROWS_AS(ExperimentConfig::load(tmp.path / "absent.json"), ConfigInvalid);
  {
    std::ofstream out(path);
    out << "{not json";
  }
  CHECK_THROWS_AS(ExperimentConfig::load(path), ConfigInvalid);
}

TEST_CASE("checked-in experiment configs parse and match their presets") {
  const fs::path root = fs::path(__FILE__).parent_path().parent_path() / "configs";
  const ExperimentConfig full3 = ExperimentConfig::load(root / "full_case3.json");
  CHECK(full3.train.n_epochs == 350);
  CHECK(full3.train.n_mc == 500);
  CHECK(full3.train.learning_rate == 0.001);
  CHECK(full3.ret.beta_e1 == 9.0);
  CHECK(full3.policy.u_max[0] == 10.0);

  const ExperimentConfig desk3 = ExperimentConfig::load(root / "desk_case3.json");
  CHECK(desk3.train.n_epochs <= 80);
  CHECK(desk3.train.n_mc <= 128);
  CHECK(desk3.ret.beta_e1 == 9.0);
  const ExperimentConfig desk1 = ExperimentConfig::load(root / "desk_case1.json");
  CHECK(desk1.ret.kind == ReturnKind::Quadratic);
  CHECK(desk1.train.master_seed == desk3.train.master_seed);
  CHECK(desk1.train.n_epochs == desk3.train.n_epochs);
  CHECK(desk1.train.n_mc == desk3.train.n_mc);
}

TEST_CASE("checkpoints round-trip losslessly") {
  TempDir tmp;
  const fs::path path = tmp.path / "ckpt.json";
  const PolicyNet net = PolicyNet::initialized(PolicyConfig{}, 2718);
  save_checkpoint(net, path);

  const PolicyNet loaded = load_checkpoint(path);
  CHECK(loaded.flatten() == net.flatten());
  CHECK(loaded.hidden_widths() == net.hidden_widths());
  CHECK(loaded.std_floor() == net.std_floor());
  CHECK(loaded.leaky_slope() == net.leaky_slope());

  // save -> load -> save is byte-stable
  const fs::path path2 = tmp.path / "ckpt2.json";
  save_checkpoint(loaded, path2);
  std::ifstream a(path), b(path2);
  const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
}

TEST_CASE("checkpoint validation") {
  TempDir tmp;
  const fs::path path = tmp.path / "bad.json";
  {
    std::ofstream out(path);
    out << R"({"format": "something-else"})";
  }
  CHECK_THROWS_AS(load_checkpoint(path), ConfigInvalid);
  CHECK_THROWS_AS(load_checkpoint(tmp.path / "absent.json"), ConfigInvalid);

  const PolicyNet net = PolicyNet::initialized(PolicyConfig{}, 1);
  PolicyConfig other;
  other.hidden_widths = {10, 10};
  CHECK_THROWS_AS(check_architecture(net, other), ArchitectureMismatch);
  PolicyConfig same;
  CHECK_NOTHROW(check_architecture(net, same));
}

TEST_CASE("output lock is exclusive and released on destruction") {
  TempDir tmp;
  const fs::path dir = tmp.path / "run";
  {
    OutputLock lock(dir);
    CHECK_THROWS_AS(OutputLock{dir}, ConfigInvalid);
  }
  CHECK_NOTHROW(OutputLock{dir});
}

TEST_CASE("doubles are formatted in shortest round-trip form") {
  CHECK(format_double(0.15) == "0.15");
  CHECK(format_double(1e308) == "1e+308");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(std::stod(format_double(2.964e-4)) == 2.964e-4);
}
