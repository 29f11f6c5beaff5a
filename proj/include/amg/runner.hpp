#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace amg {

inline constexpr const char* kToolkitVersion = "1.0.0";

/// Config schema violation; carries the JSON-pointer path of the offending
/// key so messages are anchored to the config structure.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RunOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int threads = 1;
  bool quiet = false;
  /// When set, the config's command field must match (CLI subcommand guard).
  std::string expected_command;
};

/// Execute the pipeline named in the config. Writes manifest.json,
/// report.json and command-specific CSVs under out_dir (atomically).
/// Returns 0 when every enabled check passes, 1 on a check or pipeline
/// failure, 2 on a config schema violation.
int run_config(const RunOptions& opts);

}  // namespace amg
