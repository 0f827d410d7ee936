// Command-line front end: train / evaluate / compare.
#include <CLI11.hpp>
#include <iostream>

#include "ccrl/session.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeAbort = 3;

ccrl::ExperimentConfig load_config(const std::string& config_path,
                                   const std::vector<std::string>& overrides) {
  if (config_path.empty()) {
    // start from an empty document so overrides like return.preset compose
    // with the parser's defaults
    nlohmann::json doc = nlohmann::json::object();
    for (const std::string& assignment : overrides) {
      ccrl::apply_override(doc, assignment);
    }
    return ccrl::ExperimentConfig::from_json(doc);
  }
  return ccrl::ExperimentConfig::load(config_path, overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Policy-gradient setpoint tracking for an optogenetic chemostat co-culture"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ccrl::kVersion));

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::string from_manifest;
  std::int64_t seed_flag = -1;
  bool quiet = false;

  auto* train_cmd = app.add_subcommand("train", "Train a policy and write run artifacts");
  train_cmd->add_option("--config", config_path, "Experiment config JSON");
  train_cmd->add_option("--set", overrides, "Override config fields, e.g. train.n_epochs=1");
  train_cmd->add_option("--seed", seed_flag, "Override train.master_seed");
  train_cmd->add_option("--out", out_dir, "Override output_dir");
  train_cmd->add_option("--from-manifest", from_manifest,
                        "Re-run the config snapshot of an existing manifest (requires --out)");
  train_cmd->add_flag("--quiet", quiet, "Suppress per-epoch console output");

  std::string checkpoint_path;
  int n_episodes = 50;
  std::uint64_t eval_seed = 1234;
  bool deterministic = false;
  auto* eval_cmd = app.add_subcommand("evaluate", "Roll out a frozen policy checkpoint");
  eval_cmd->add_option("--checkpoint", checkpoint_path, "Policy checkpoint JSON")->required();
  eval_cmd->add_option("--config", config_path, "Experiment config JSON");
  eval_cmd->add_option("--set", overrides, "Override config fields");
  eval_cmd->add_option("--n-episodes", n_episodes, "Number of evaluation episodes");
  eval_cmd->add_option("--seed", eval_seed, "Evaluation seed");
  eval_cmd->add_flag("--deterministic", deterministic, "Act at the policy mean");
  eval_cmd->add_option("--out", out_dir, "Output directory (default: <config output_dir>/eval)");

  std::vector<std::string> manifest_args;
  auto* compare_cmd = app.add_subcommand("compare", "Join epoch stats of completed runs");
  compare_cmd->add_option("manifests", manifest_args, "Run manifest paths (>= 2)")->expected(-1);
  compare_cmd->add_option("--out", out_dir, "Output directory (default: .)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) {
      if (!from_manifest.empty()) {
        if (out_dir.empty()) {
          std::cerr << "--from-manifest requires --out (a fresh output directory)\n";
          return kExitConfigError;
        }
        ccrl::run_training_from_manifest(from_manifest, out_dir, quiet);
        return kExitOk;
      }
      ccrl::ExperimentConfig cfg = load_config(config_path, overrides);
      if (seed_flag >= 0) {
        cfg.train.master_seed = static_cast<std::uint64_t>(seed_flag);
      }
      if (!out_dir.empty()) {
        cfg.output_dir = out_dir;
      }
      ccrl::run_training_session(cfg, quiet);
      return kExitOk;
    }

    if (eval_cmd->parsed()) {
      ccrl::ExperimentConfig cfg = load_config(config_path, overrides);
      const std::filesystem::path out =
          out_dir.empty() ? cfg.output_dir / "eval" : std::filesystem::path(out_dir);
      const nlohmann::json report = ccrl::run_evaluation_session(
          checkpoint_path, cfg, n_episodes, eval_seed, deterministic, out);
      std::cout << report["metrics"].dump(2) << "\n";
      return kExitOk;
    }

    if (compare_cmd->parsed()) {
      std::vector<std::filesystem::path> manifests(manifest_args.begin(), manifest_args.end());
      const std::filesystem::path out = out_dir.empty() ? "." : std::filesystem::path(out_dir);
      const nlohmann::json summary = ccrl::run_comparison(manifests, out);
      for (const auto& run : summary["runs"]) {
        std::cout << run.value("label", "?") << "  kind=" << run.value("return_kind", "?")
                  << "  best_epoch=" << run.value("best_epoch", -1)
                  << "  best_mean_J=" << run.value("best_mean_return", 0.0);
        if (run.contains("terminal_abs_error_b1")) {
          std::cout << "  terminal_err=(" << run["terminal_abs_error_b1"].get<double>() << ", "
                    << run["terminal_abs_error_b2"].get<double>() << ")";
        }
        std::cout << "\n";
      }
      return kExitOk;
    }
  } catch (const ccrl::ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ccrl::ManifestMissing& e) {
    std::cerr << "manifest error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ccrl::ArchitectureMismatch& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "aborted: " << e.what() << "\n";
    return kExitRuntimeAbort;
  }
  return kExitOk;
}
