#include "ccrl/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>

namespace ccrl {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigInvalid("config field '" + path + "' " + what);
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "must be an object");
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) fail(path + "." + it.key(), "is not a recognized field");
  }
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "must be a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "must be an integer");
  return j.get<int>();
}

std::uint64_t as_u64(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) fail(path, "must be an integer");
  return j.get<std::uint64_t>();
}

std::array<double, 2> as_pair(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "must be an array of 2 numbers");
  return {as_double(j[0], path + "[0]"), as_double(j[1], path + "[1]")};
}

std::array<double, 5> as_five(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 5) fail(path, "must be an array of 5 numbers");
  std::array<double, 5> out{};
  for (int i = 0; i < 5; ++i) out[static_cast<std::size_t>(i)] = as_double(j[i], path);
  return out;
}

ModelParams parse_model(const json& j) {
  expect_object(j, "model");
  check_keys(j, "model",
             {"mu_max", "k_s", "f_c", "k_a", "y_sb", "q_a_max", "hill_n", "k_i", "d_a", "d_l",
              "s_in"});
  ModelParams p;
  if (j.contains("mu_max")) p.mu_max = as_pair(j["mu_max"], "model.mu_max");
  if (j.contains("k_s")) p.k_s = as_pair(j["k_s"], "model.k_s");
  if (j.contains("f_c")) p.f_c = as_double(j["f_c"], "model.f_c");
  if (j.contains("k_a")) p.k_a = as_pair(j["k_a"], "model.k_a");
  if (j.contains("y_sb")) p.y_sb = as_pair(j["y_sb"], "model.y_sb");
  if (j.contains("q_a_max")) p.q_a_max = as_pair(j["q_a_max"], "model.q_a_max");
  if (j.contains("hill_n")) p.hill_n = as_pair(j["hill_n"], "model.hill_n");
  if (j.contains("k_i")) p.k_i = as_pair(j["k_i"], "model.k_i");
  if (j.contains("d_a")) p.d_a = as_pair(j["d_a"], "model.d_a");
  if (j.contains("d_l")) p.d_l = as_double(j["d_l"], "model.d_l");
  if (j.contains("s_in")) p.s_in = as_double(j["s_in"], "model.s_in");
  return p;
}

SystemState parse_initial_state(const json& j) {
  expect_object(j, "initial_state");
  check_keys(j, "initial_state", {"s", "b1", "b2", "a1", "a2"});
  SystemState x{5.5, 0.005, 0.005, 1.545e-2, 1.655e-3};
  if (j.contains("s")) x.s = as_double(j["s"], "initial_state.s");
  if (j.contains("b1")) x.b1 = as_double(j["b1"], "initial_state.b1");
  if (j.contains("b2")) x.b2 = as_double(j["b2"], "initial_state.b2");
  if (j.contains("a1")) x.a1 = as_double(j["a1"], "initial_state.a1");
  if (j.contains("a2")) x.a2 = as_double(j["a2"], "initial_state.a2");
  return x;
}

IntegratorConfig parse_integrator(const json& j) {
  expect_object(j, "integrator");
  check_keys(j, "integrator", {"substeps_per_hour", "noise_std"});
  IntegratorConfig cfg;
  if (j.contains("substeps_per_hour")) {
    cfg.substeps_per_hour = as_int(j["substeps_per_hour"], "integrator.substeps_per_hour");
  }
  if (j.contains("noise_std") && !j["noise_std"].is_null()) {
    const json& n = j["noise_std"];
    if (n.is_number()) {
      const double v = n.get<double>();
      cfg.noise_std = std::array<double, 5>{v, v, v, v, v};
    } else {
      cfg.noise_std = as_five(n, "integrator.noise_std");
    }
  }
  return cfg;
}

PolicyConfig parse_policy(const json& j) {
  expect_object(j, "policy");
  check_keys(j, "policy",
             {"hidden_widths", "leaky_slope", "std_floor", "u_max", "head_init_scale",
              "std_head_bias_init"});
  PolicyConfig cfg;
  if (j.contains("hidden_widths")) {
    const json& hw = j["hidden_widths"];
    if (!hw.is_array() || hw.empty()) fail("policy.hidden_widths", "must be a non-empty array");
    cfg.hidden_widths.clear();
    for (const auto& w : hw) cfg.hidden_widths.push_back(as_int(w, "policy.hidden_widths"));
  }
  if (j.contains("leaky_slope")) cfg.leaky_slope = as_double(j["leaky_slope"], "policy.leaky_slope");
  if (j.contains("std_floor")) cfg.std_floor = as_double(j["std_floor"], "policy.std_floor");
  if (j.contains("u_max")) cfg.u_max = as_pair(j["u_max"], "policy.u_max");
  if (j.contains("head_init_scale")) {
    cfg.head_init_scale = as_double(j["head_init_scale"], "policy.head_init_scale");
  }
  if (j.contains("std_head_bias_init")) {
    cfg.std_head_bias_init = as_double(j["std_head_bias_init"], "policy.std_head_bias_init");
  }
  return cfg;
}

TrainConfig parse_train(const json& j) {
  expect_object(j, "train");
  check_keys(j, "train",
             {"n_epochs", "n_mc", "learning_rate", "baseline_epsilon", "optimizer", "master_seed",
              "beta1", "beta2", "moment_epsilon"});
  TrainConfig cfg;
  if (j.contains("n_epochs")) cfg.n_epochs = as_int(j["n_epochs"], "train.n_epochs");
  if (j.contains("n_mc")) cfg.n_mc = as_int(j["n_mc"], "train.n_mc");
  if (j.contains("learning_rate")) {
    cfg.learning_rate = as_double(j["learning_rate"], "train.learning_rate");
  }
  if (j.contains("baseline_epsilon")) {
    cfg.baseline_epsilon = as_double(j["baseline_epsilon"], "train.baseline_epsilon");
  }
  if (j.contains("optimizer")) {
    const std::string name = j["optimizer"].is_string() ? j["optimizer"].get<std::string>() : "";
    if (name == "plain_ascent") {
      cfg.optimizer = OptimizerKind::PlainAscent;
    } else if (name == "adaptive_moments") {
      cfg.optimizer = OptimizerKind::AdaptiveMoments;
    } else {
      fail("train.optimizer", "must be \"plain_ascent\" or \"adaptive_moments\"");
    }
  }
  if (j.contains("master_seed")) cfg.master_seed = as_u64(j["master_seed"], "train.master_seed");
  if (j.contains("beta1")) cfg.beta1 = as_double(j["beta1"], "train.beta1");
  if (j.contains("beta2")) cfg.beta2 = as_double(j["beta2"], "train.beta2");
  if (j.contains("moment_epsilon")) {
    cfg.moment_epsilon = as_double(j["moment_epsilon"], "train.moment_epsilon");
  }
  return cfg;
}

ReturnConfig parse_return(const json& j, int horizon) {
  expect_object(j, "return");
  if (j.contains("preset")) {
    check_keys(j, "return", {"preset"});
    if (!j["preset"].is_string()) fail("return.preset", "must be a string");
    return ReturnConfig::preset(j["preset"].get<std::string>(), horizon);
  }

  check_keys(j, "return",
             {"kind", "b1_star", "b2_star", "w1", "w2", "beta_vmax", "beta_e1", "beta_e2",
              "stage_weights", "terminal_weight"});
  if (!j.contains("kind") || !j["kind"].is_string()) {
    fail("return.kind", "is required (\"quadratic\" or \"saturation\") unless a preset is used");
  }
  ReturnConfig cfg;
  cfg.horizon = horizon;
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "quadratic") {
    cfg.kind = ReturnKind::Quadratic;
  } else if (kind == "saturation") {
    cfg.kind = ReturnKind::Saturation;
  } else {
    fail("return.kind", "must be \"quadratic\" or \"saturation\"");
  }
  if (j.contains("b1_star")) cfg.b1_star = as_double(j["b1_star"], "return.b1_star");
  if (j.contains("b2_star")) cfg.b2_star = as_double(j["b2_star"], "return.b2_star");
  if (cfg.kind == ReturnKind::Quadratic) {
    if (j.contains("w1")) cfg.w1 = as_double(j["w1"], "return.w1");
    if (j.contains("w2")) cfg.w2 = as_double(j["w2"], "return.w2");
    return cfg;
  }
  // Saturation steepness has no sensible default in explicit form.
  if (!j.contains("beta_e1")) fail("return.beta_e1", "is required for the saturation kind");
  if (!j.contains("beta_e2")) fail("return.beta_e2", "is required for the saturation kind");
  cfg.beta_e1 = as_double(j["beta_e1"], "return.beta_e1");
  cfg.beta_e2 = as_double(j["beta_e2"], "return.beta_e2");
  if (j.contains("beta_vmax")) cfg.beta_vmax = as_double(j["beta_vmax"], "return.beta_vmax");
  if (j.contains("stage_weights")) {
    const json& sw = j["stage_weights"];
    if (!sw.is_array()) fail("return.stage_weights", "must be an array");
    cfg.stage_weights.clear();
    for (const auto& w : sw) cfg.stage_weights.push_back(as_double(w, "return.stage_weights"));
  }
  if (j.contains("terminal_weight")) {
    cfg.terminal_weight = as_double(j["terminal_weight"], "return.terminal_weight");
  }
  return cfg;
}

ObsScaling parse_obs_scaling(const json& j) {
  expect_object(j, "obs_scaling");
  check_keys(j, "obs_scaling", {"scale", "offset"});
  ObsScaling sc;
  if (j.contains("scale")) sc.scale = as_five(j["scale"], "obs_scaling.scale");
  if (j.contains("offset")) sc.offset = as_five(j["offset"], "obs_scaling.offset");
  return sc;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
  expect_object(doc, "(root)");
  check_keys(doc, "(root)",
             {"model", "initial_state", "horizon", "integrator", "policy", "train", "return",
              "obs_scaling", "n_threads", "output_dir"});

  ExperimentConfig cfg;
  if (doc.contains("horizon")) cfg.horizon = as_int(doc["horizon"], "horizon");
  if (doc.contains("model")) cfg.model = parse_model(doc["model"]);
  if (doc.contains("initial_state")) cfg.initial_state = parse_initial_state(doc["initial_state"]);
  if (doc.contains("integrator")) cfg.integrator = parse_integrator(doc["integrator"]);
  if (doc.contains("policy")) cfg.policy = parse_policy(doc["policy"]);
  if (doc.contains("train")) cfg.train = parse_train(doc["train"]);
  cfg.ret = doc.contains("return") ? parse_return(doc["return"], cfg.horizon)
                                   : ReturnConfig::preset("case3", cfg.horizon);
  if (doc.contains("obs_scaling") && !doc["obs_scaling"].is_null()) {
    cfg.obs_scaling = parse_obs_scaling(doc["obs_scaling"]);
  }
  if (doc.contains("n_threads")) cfg.n_threads = as_int(doc["n_threads"], "n_threads");
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) fail("output_dir", "must be a string");
    cfg.output_dir = doc["output_dir"].get<std::string>();
  }
  cfg.validate();
  return cfg;
}

json ExperimentConfig::to_json() const {
  json doc;
  doc["model"] = {{"mu_max", model.mu_max}, {"k_s", model.k_s},       {"f_c", model.f_c},
                  {"k_a", model.k_a},       {"y_sb", model.y_sb},     {"q_a_max", model.q_a_max},
                  {"hill_n", model.hill_n}, {"k_i", model.k_i},       {"d_a", model.d_a},
                  {"d_l", model.d_l},       {"s_in", model.s_in}};
  doc["initial_state"] = {{"s", initial_state.s},
                          {"b1", initial_state.b1},
                          {"b2", initial_state.b2},
                          {"a1", initial_state.a1},
                          {"a2", initial_state.a2}};
  doc["horizon"] = horizon;
  doc["integrator"] = {{"substeps_per_hour", integrator.substeps_per_hour}};
  if (integrator.noise_std) {
    doc["integrator"]["noise_std"] = *integrator.noise_std;
  }
  doc["policy"] = {{"hidden_widths", policy.hidden_widths},
                   {"leaky_slope", policy.leaky_slope},
                   {"std_floor", policy.std_floor},
                   {"u_max", policy.u_max},
                   {"head_init_scale", policy.head_init_scale},
                   {"std_head_bias_init", policy.std_head_bias_init}};
  doc["train"] = {
      {"n_epochs", train.n_epochs},
      {"n_mc", train.n_mc},
      {"learning_rate", train.learning_rate},
      {"baseline_epsilon", train.baseline_epsilon},
      {"optimizer",
       train.optimizer == OptimizerKind::PlainAscent ? "plain_ascent" : "adaptive_moments"},
      {"master_seed", train.master_seed},
      {"beta1", train.beta1},
      {"beta2", train.beta2},
      {"moment_epsilon", train.moment_epsilon}};
  json ret_doc;
  ret_doc["kind"] = ret.kind == ReturnKind::Quadratic ? "quadratic" : "saturation";
  ret_doc["b1_star"] = ret.b1_star;
  ret_doc["b2_star"] = ret.b2_star;
  if (ret.kind == ReturnKind::Quadratic) {
    ret_doc["w1"] = ret.w1;
    ret_doc["w2"] = ret.w2;
  } else {
    ret_doc["beta_vmax"] = ret.beta_vmax;
    ret_doc["beta_e1"] = ret.beta_e1;
    ret_doc["beta_e2"] = ret.beta_e2;
    ret_doc["stage_weights"] =
        ret.stage_weights.empty()
            ? std::vector<double>(static_cast<std::size_t>(ret.horizon - 1), 1.0)
            : ret.stage_weights;
    ret_doc["terminal_weight"] = ret.terminal_weight;
  }
  doc["return"] = ret_doc;
  if (obs_scaling) {
    doc["obs_scaling"] = {{"scale", obs_scaling->scale}, {"offset", obs_scaling->offset}};
  }
  doc["n_threads"] = n_threads;
  doc["output_dir"] = output_dir.string();
  return doc;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path,
                                        const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigInvalid("cannot open config file: " + path.string());
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigInvalid("config " + path.string() + " is not valid JSON: " + e.what());
  }
  for (const std::string& assignment : overrides) {
    apply_override(doc, assignment);
  }
  return from_json(doc);
}

void ExperimentConfig::validate() const {
  model.validate();
  if (horizon < 2) throw ConfigInvalid("config field 'horizon' must be >= 2");
  if (integrator.substeps_per_hour < 1) {
    throw ConfigInvalid("config field 'integrator.substeps_per_hour' must be >= 1");
  }
  if (integrator.noise_std) {
    for (double v : *integrator.noise_std) {
      if (v < 0.0 || !std::isfinite(v)) {
        throw ConfigInvalid("config field 'integrator.noise_std' entries must be >= 0");
      }
    }
  }
  const auto init = initial_state.as_array();
  for (double v : init) {
    if (v < 0.0 || !std::isfinite(v)) {
      throw ConfigInvalid("config field 'initial_state' components must be finite and >= 0");
    }
  }
  for (int w : policy.hidden_widths) {
    if (w < 1) throw ConfigInvalid("config field 'policy.hidden_widths' entries must be >= 1");
  }
  if (!(policy.std_floor > 0.0)) throw ConfigInvalid("config field 'policy.std_floor' must be > 0");
  if (!(policy.leaky_slope >= 0.0)) {
    throw ConfigInvalid("config field 'policy.leaky_slope' must be >= 0");
  }
  if (!(policy.u_max[0] > 0.0) || !(policy.u_max[1] > 0.0)) {
    throw ConfigInvalid("config field 'policy.u_max' components must be > 0");
  }
  train.validate();
  if (ret.horizon != horizon) {
    throw ConfigInvalid("config field 'return' horizon " + std::to_string(ret.horizon) +
                        " disagrees with config horizon " + std::to_string(horizon));
  }
  ret.validate();
  if (n_threads < 0) throw ConfigInvalid("config field 'n_threads' must be >= 0");
  if (output_dir.empty()) throw ConfigInvalid("config field 'output_dir' must not be empty");
}

RolloutConfig ExperimentConfig::rollout_config() const {
  RolloutConfig cfg;
  cfg.initial_state = initial_state;
  cfg.horizon = horizon;
  cfg.integrator = integrator;
  cfg.u_max = policy.u_max;
  cfg.ret = ret;
  cfg.obs_scaling = obs_scaling;
  cfg.n_threads = n_threads;
  return cfg;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigInvalid("override '" + assignment + "' is not of the form path.to.key=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  json* node = &doc;
  std::size_t begin = 0;
  while (true) {
    const std::size_t dot = path.find('.', begin);
    const std::string key = path.substr(begin, dot == std::string::npos ? dot : dot - begin);
    if (key.empty()) {
      throw ConfigInvalid("override '" + assignment + "' has an empty path segment");
    }
    if (dot == std::string::npos) {
      json parsed = json::parse(value, nullptr, false);
      (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
      return;
    }
    node = &(*node)[key];
    if (!node->is_object() && !node->is_null()) {
      throw ConfigInvalid("override '" + assignment + "' descends into a non-object field");
    }
    begin = dot + 1;
  }
}

}  // namespace ccrl
