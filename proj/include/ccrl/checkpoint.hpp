#pragma once

#include <filesystem>

#include "ccrl/policy_net.hpp"

namespace ccrl {

// Versioned JSON checkpoint: an architecture header (input width, hidden
// widths, activation name and slope, std_floor) plus the flattened parameter
// vector. Doubles are serialized in shortest round-trip form, so
// save -> load -> save is lossless.
void save_checkpoint(const PolicyNet& policy, const std::filesystem::path& path);

PolicyNet load_checkpoint(const std::filesystem::path& path);

// Throws ArchitectureMismatch when a loaded policy disagrees with the
// configured architecture.
void check_architecture(const PolicyNet& policy, const PolicyConfig& cfg);

}  // namespace ccrl
