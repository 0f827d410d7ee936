#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "ccrl/evaluation.hpp"
#include "ccrl/trainer.hpp"

namespace ccrl {

// Shortest round-trip decimal form; keeps CSV artifacts byte-deterministic
// for identical runs.
std::string format_double(double v);

// Exclusive lock file inside a run directory; a second holder throws
// ConfigInvalid. Released (and removed) on destruction.
class OutputLock {
 public:
  explicit OutputLock(const std::filesystem::path& dir);
  ~OutputLock();
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  std::filesystem::path lock_path_;
};

// epoch,mean_J,std_J,min_J,max_J,grad_norm — the deterministic per-epoch
// stats. Wall time lives in the timing CSV so that reruns from a manifest
// reproduce this file byte for byte.
void write_epoch_stats_csv(const std::filesystem::path& path, std::span<const EpochStats> stats);

// epoch,seconds
void write_epoch_timing_csv(const std::filesystem::path& path, std::span<const EpochStats> stats);

// episode,t,s,b1,b2,a1,a2,I1_raw,I2_raw,I1_applied,I2_applied,log_prob with
// one row per post-action state (t = 1..t_f); the action columns belong to
// the step that produced the row's state.
void write_trajectories_csv(const std::filesystem::path& path,
                            std::span<const Trajectory> episodes);

// Mean/std bands over episodes for states, growth rates and inputs,
// t = 0..t_f (input cells are empty on the terminal row).
void write_evaluation_timeseries_csv(const std::filesystem::path& path,
                                     const EvaluationResult& result);

std::string utc_timestamp();

}  // namespace ccrl
