#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "diffsr/agent/online.hpp"

namespace diffsr::app {

/// Everything one experiment needs.
struct RunConfig {
  agent::AgentConfig agent;
  std::string output_dir = "runs/default";
  std::int64_t checkpoint_interval = 0;  // 0: only the final checkpoint
};

/// Grammar, one statement per line:
///
///   # comment            (also ';')
///   [section]            optional, purely organizational
///   key = value          value may be double-quoted
///
/// Keys are flat and unique; unknown keys, malformed values and out-of-range
/// values raise ConfigError naming the source and line.
RunConfig parse_config_text(const std::string& text, const std::string& source = "<inline>");
RunConfig parse_config_file(const std::filesystem::path& path);

/// Applies one key=value on top of an existing config (used for CLI flags).
void apply_setting(RunConfig& config, const std::string& key, const std::string& value,
                   const std::string& where = "override");

/// Every recognized key, in echo order.
const std::vector<std::string>& config_keys();

/// The effective configuration in the same grammar; parsing it back yields
/// an identical config.
std::string config_echo(const RunConfig& config);

/// output_dir resolved against $DIFFSR_OUTPUT_ROOT when it is relative and the
/// variable is set.
std::filesystem::path resolve_output_dir(const RunConfig& config);

inline constexpr const char* kOutputRootVar = "DIFFSR_OUTPUT_ROOT";

}  // namespace diffsr::app
