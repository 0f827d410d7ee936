#pragma once

#include <stdexcept>
#include <string>

namespace ccrl {

// Integration produced a NaN/Inf state component; the episode must be aborted.
struct NonFiniteState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Trajectory length does not match the horizon expected by a return config.
struct LengthMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IndexOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// More than 10% of a batch's episodes ended non-finite.
struct BatchDegenerate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigInvalid : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Checkpoint architecture header disagrees with the configured policy.
struct ArchitectureMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ManifestMissing : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ccrl
