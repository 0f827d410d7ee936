#include "ccrl/artifacts.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <array>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>

#include "ccrl/errors.hpp"

namespace ccrl {

std::string format_double(double v) {
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

OutputLock::OutputLock(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  lock_path_ = dir / "run.lock";
  const int fd = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    throw ConfigInvalid("output directory " + dir.string() +
                        " appears to be in use (run.lock exists)");
  }
  ::close(fd);
}

OutputLock::~OutputLock() {
  std::error_code ec;
  std::filesystem::remove(lock_path_, ec);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigInvalid("cannot open output file: " + path.string());
  }
  return out;
}

}  // namespace

void write_epoch_stats_csv(const std::filesystem::path& path, std::span<const EpochStats> stats) {
  auto out = open_out(path);
  out << "epoch,mean_J,std_J,min_J,max_J,grad_norm\n";
  for (const EpochStats& s : stats) {
    out << s.epoch << ',' << format_double(s.mean_return) << ',' << format_double(s.std_return)
        << ',' << format_double(s.min_return) << ',' << format_double(s.max_return) << ','
        << format_double(s.grad_norm) << '\n';
  }
}

void write_epoch_timing_csv(const std::filesystem::path& path, std::span<const EpochStats> stats) {
  auto out = open_out(path);
  out << "epoch,seconds\n";
  for (const EpochStats& s : stats) {
    out << s.epoch << ',' << format_double(s.seconds) << '\n';
  }
}

void write_trajectories_csv(const std::filesystem::path& path,
                            std::span<const Trajectory> episodes) {
  auto out = open_out(path);
  out << "episode,t,s,b1,b2,a1,a2,I1_raw,I2_raw,I1_applied,I2_applied,log_prob\n";
  for (std::size_t ep = 0; ep < episodes.size(); ++ep) {
    const Trajectory& traj = episodes[ep];
    for (int t = 1; t <= traj.horizon(); ++t) {
      const TrajectoryStep& st = traj.steps[static_cast<std::size_t>(t) - 1];
      const SystemState& x = st.next_state;
      out << ep << ',' << t << ',' << format_double(x.s) << ',' << format_double(x.b1) << ','
          << format_double(x.b2) << ',' << format_double(x.a1) << ',' << format_double(x.a2) << ','
          << format_double(st.raw_action[0]) << ',' << format_double(st.raw_action[1]) << ','
          << format_double(st.applied.i1) << ',' << format_double(st.applied.i2) << ','
          << format_double(st.log_prob) << '\n';
    }
  }
}

void write_evaluation_timeseries_csv(const std::filesystem::path& path,
                                     const EvaluationResult& result) {
  auto out = open_out(path);
  out << "t,s_mean,s_std,b1_mean,b1_std,b2_mean,b2_std,a1_mean,a1_std,a2_mean,a2_std,"
         "mu1_mean,mu1_std,mu2_mean,mu2_std,I1_mean,I1_std,I2_mean,I2_std\n";
  const std::size_t n_times = result.s.mean.size();
  for (std::size_t t = 0; t < n_times; ++t) {
    auto cell = [&](const EvaluationResult::Series& series) {
      out << ',' << format_double(series.mean[t]) << ',' << format_double(series.stdev[t]);
    };
    out << t;
    cell(result.s);
    cell(result.b1);
    cell(result.b2);
    cell(result.a1);
    cell(result.a2);
    cell(result.mu1);
    cell(result.mu2);
    if (t < result.i1.mean.size()) {
      cell(result.i1);
      cell(result.i2);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace ccrl
