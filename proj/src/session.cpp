#include "ccrl/session.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "ccrl/artifacts.hpp"
#include "ccrl/checkpoint.hpp"
#include "ccrl/seeding.hpp"

namespace ccrl {

namespace {

using nlohmann::json;

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigInvalid("cannot open output file: " + path.string());
  }
  out << doc.dump(2) << "\n";
}

json load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ManifestMissing("manifest not found: " + path.string());
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ManifestMissing("manifest " + path.string() + " is not valid JSON: " + e.what());
  }
  if (doc.value("format", "") != "ccrl-run-manifest") {
    throw ManifestMissing("file " + path.string() + " is not a run manifest");
  }
  return doc;
}

json eval_summary(const EvaluationResult& eval) {
  return json{{"terminal_abs_error_b1", eval.terminal_abs_error[0]},
              {"terminal_abs_error_b2", eval.terminal_abs_error[1]},
              {"final_window_hours", eval.final_window_hours},
              {"final_window_abs_error_b1", eval.final_window_abs_error[0]},
              {"final_window_abs_error_b2", eval.final_window_abs_error[1]},
              {"growth_window_hours", eval.growth_window_hours},
              {"growth_deviation_mu1", eval.final_growth_deviation[0]},
              {"growth_deviation_mu2", eval.final_growth_deviation[1]},
              {"mean_return", eval.mean_return},
              {"n_episodes", eval.n_episodes},
              {"deterministic", eval.deterministic}};
}

}  // namespace

json run_training_session(const ExperimentConfig& cfg, bool quiet) {
  cfg.validate();
  const std::filesystem::path out_dir = cfg.output_dir;
  OutputLock lock(out_dir);

  const auto started = utc_timestamp();
  TrainResult result =
      train(cfg.train, cfg.rollout_config(), cfg.model, cfg.policy, [&](const EpochStats& s) {
        if (!quiet) {
          std::cout << "epoch " << s.epoch << "  mean_J=" << s.mean_return
                    << "  std_J=" << s.std_return << "  grad_norm=" << s.grad_norm << "  ("
                    << s.seconds << " s)\n";
        }
      });

  write_epoch_stats_csv(out_dir / "epoch_stats.csv", result.stats);
  write_epoch_timing_csv(out_dir / "epoch_timing.csv", result.stats);
  save_checkpoint(result.best_params, out_dir / "checkpoint_best.json");
  save_checkpoint(result.final_params, out_dir / "checkpoint_final.json");

  // Deterministic single-episode readout of the best policy for the summary.
  RolloutConfig eval_cfg = cfg.rollout_config();
  eval_cfg.n_threads = 1;
  const EvaluationResult best_eval =
      evaluate_policy(result.best_params, cfg.model, eval_cfg, 1, 0, /*deterministic=*/true);

  double total_seconds = 0.0;
  for (const EpochStats& s : result.stats) total_seconds += s.seconds;

  std::vector<std::uint64_t> epoch_seeds;
  epoch_seeds.reserve(static_cast<std::size_t>(cfg.train.n_epochs));
  for (int m = 0; m < cfg.train.n_epochs; ++m) {
    epoch_seeds.push_back(derive_seed(cfg.train.master_seed, static_cast<std::uint64_t>(m) + 1));
  }

  json manifest;
  manifest["format"] = "ccrl-run-manifest";
  manifest["version"] = 1;
  manifest["tool_version"] = kVersion;
  manifest["command"] = "train";
  manifest["created_utc"] = started;
  manifest["finished_utc"] = utc_timestamp();
  manifest["config"] = cfg.to_json();
  manifest["seeds"] = {{"master", cfg.train.master_seed},
                       {"policy_init", derive_seed(cfg.train.master_seed, 0)},
                       {"epochs", epoch_seeds}};
  manifest["artifacts"] = {{"epoch_stats_csv", "epoch_stats.csv"},
                           {"epoch_timing_csv", "epoch_timing.csv"},
                           {"checkpoint_best", "checkpoint_best.json"},
                           {"checkpoint_final", "checkpoint_final.json"}};
  manifest["results"] = {{"best_epoch", result.best_epoch},
                         {"best_mean_return", result.best_mean_return},
                         {"final_mean_return", result.stats.back().mean_return},
                         {"total_seconds", total_seconds},
                         {"best_eval", eval_summary(best_eval)}};
  write_json(out_dir / "manifest.json", manifest);

  if (!quiet) {
    std::cout << "best epoch " << result.best_epoch << " with mean return "
              << result.best_mean_return << "\n";
  }
  return manifest;
}

json run_training_from_manifest(const std::filesystem::path& manifest_path,
                                const std::filesystem::path& out_dir, bool quiet) {
  const json manifest = load_manifest(manifest_path);
  if (!manifest.contains("config")) {
    throw ManifestMissing("manifest " + manifest_path.string() + " has no config snapshot");
  }
  json config_doc = manifest["config"];
  config_doc["output_dir"] = out_dir.string();
  return run_training_session(ExperimentConfig::from_json(config_doc), quiet);
}

json run_evaluation_session(const std::filesystem::path& checkpoint_path,
                            const ExperimentConfig& cfg, int n_episodes, std::uint64_t seed,
                            bool deterministic, const std::filesystem::path& out_dir) {
  cfg.validate();
  PolicyNet policy = load_checkpoint(checkpoint_path);
  check_architecture(policy, cfg.policy);

  OutputLock lock(out_dir);
  const EvaluationResult eval =
      evaluate_policy(policy, cfg.model, cfg.rollout_config(), n_episodes, seed, deterministic);

  write_evaluation_timeseries_csv(out_dir / "evaluation_timeseries.csv", eval);
  write_trajectories_csv(out_dir / "trajectories.csv", eval.episodes);

  json report;
  report["format"] = "ccrl-evaluation-report";
  report["version"] = 1;
  report["tool_version"] = kVersion;
  report["created_utc"] = utc_timestamp();
  report["checkpoint"] = checkpoint_path.string();
  report["seed"] = seed;
  report["metrics"] = eval_summary(eval);
  report["artifacts"] = {{"timeseries_csv", "evaluation_timeseries.csv"},
                         {"trajectories_csv", "trajectories.csv"}};
  write_json(out_dir / "evaluation_report.json", report);
  return report;
}

json run_comparison(const std::vector<std::filesystem::path>& manifest_paths,
                    const std::filesystem::path& out_dir) {
  if (manifest_paths.size() < 2) {
    throw ManifestMissing("compare needs at least 2 run manifests, got " +
                          std::to_string(manifest_paths.size()));
  }

  struct Run {
    json manifest;
    std::vector<std::string> stat_rows;  // CSV data lines, epoch-indexed
    std::string label;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < manifest_paths.size(); ++i) {
    Run run;
    run.manifest = load_manifest(manifest_paths[i]);
    run.label = "run" + std::to_string(i + 1);
    const auto stats_rel =
        run.manifest.at("artifacts").value("epoch_stats_csv", "epoch_stats.csv");
    const auto stats_path = manifest_paths[i].parent_path() / stats_rel;
    std::ifstream in(stats_path);
    if (!in) {
      throw ManifestMissing("epoch stats listed in " + manifest_paths[i].string() +
                            " not found at " + stats_path.string());
    }
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (!line.empty()) run.stat_rows.push_back(line);
    }
    runs.push_back(std::move(run));
  }

  std::filesystem::create_directories(out_dir);
  std::size_t max_epochs = 0;
  for (const Run& run : runs) max_epochs = std::max(max_epochs, run.stat_rows.size());

  std::ofstream out(out_dir / "comparison.csv");
  if (!out) {
    throw ConfigInvalid("cannot open output file: " + (out_dir / "comparison.csv").string());
  }
  out << "epoch";
  for (const Run& run : runs) {
    for (const char* col : {"mean_J", "std_J", "min_J", "max_J", "grad_norm"}) {
      out << ',' << run.label << '_' << col;
    }
  }
  out << '\n';
  for (std::size_t epoch = 0; epoch < max_epochs; ++epoch) {
    out << epoch;
    for (const Run& run : runs) {
      if (epoch < run.stat_rows.size()) {
        const std::string& row = run.stat_rows[epoch];
        out << row.substr(row.find(','));  // drop the epoch column
      } else {
        out << ",,,,,";
      }
    }
    out << '\n';
  }

  json summary;
  summary["format"] = "ccrl-comparison-summary";
  summary["created_utc"] = utc_timestamp();
  summary["runs"] = json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const json& results = runs[i].manifest.at("results");
    json entry;
    entry["label"] = runs[i].label;
    entry["manifest"] = manifest_paths[i].string();
    entry["return_kind"] = runs[i].manifest.at("config").at("return").value("kind", "?");
    if (runs[i].manifest["config"]["return"].contains("beta_e1")) {
      entry["beta_e1"] = runs[i].manifest["config"]["return"]["beta_e1"];
    }
    entry["best_epoch"] = results.value("best_epoch", -1);
    entry["best_mean_return"] = results.value("best_mean_return", 0.0);
    if (results.contains("best_eval")) {
      entry["terminal_abs_error_b1"] = results["best_eval"].value("terminal_abs_error_b1", 0.0);
      entry["terminal_abs_error_b2"] = results["best_eval"].value("terminal_abs_error_b2", 0.0);
    }
    summary["runs"].push_back(entry);
  }
  write_json(out_dir / "comparison_summary.json", summary);
  return summary;
}

}  // namespace ccrl
