#pragma once

#include <filesystem>
#include <json.hpp>
#include <vector>

#include "ccrl/config.hpp"

namespace ccrl {

// Orchestration behind the CLI verbs. Each session owns its output directory
// (lock file), writes every artifact listed in the returned manifest/report,
// and is what the acceptance suite drives directly.

// Runs the full training loop and writes epoch_stats.csv, epoch_timing.csv,
// checkpoint_best.json, checkpoint_final.json and manifest.json into
// cfg.output_dir. `quiet` suppresses the per-epoch console line.
nlohmann::json run_training_session(const ExperimentConfig& cfg, bool quiet = false);

// Re-runs training from a manifest's config snapshot (and therefore its
// seeds), redirected into out_dir. Produces byte-identical epoch stats.
nlohmann::json run_training_from_manifest(const std::filesystem::path& manifest_path,
                                          const std::filesystem::path& out_dir,
                                          bool quiet = false);

// Frozen-policy evaluation: writes evaluation_timeseries.csv,
// trajectories.csv and evaluation_report.json into out_dir and returns the
// report.
nlohmann::json run_evaluation_session(const std::filesystem::path& checkpoint_path,
                                      const ExperimentConfig& cfg, int n_episodes,
                                      std::uint64_t seed, bool deterministic,
                                      const std::filesystem::path& out_dir);

// Joins the epoch stats of >= 2 completed runs into comparison.csv plus a
// summary (best mean return, its epoch, terminal tracking errors per run).
nlohmann::json run_comparison(const std::vector<std::filesystem::path>& manifest_paths,
                              const std::filesystem::path& out_dir);

}  // namespace ccrl
