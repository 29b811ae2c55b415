#pragma once

// JSON configuration for the music_lite tool. Every section is optional and
// falls back to the library defaults; unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "musiclite/dse.hpp"
#include "musiclite/pipeline.hpp"

namespace musiclite::cli {

struct OutputConfig {
  std::filesystem::path dir = "music_lite_out";
  std::optional<std::filesystem::path> spectrum;  // CSV range_m,p_mu
};

struct CliConfig {
  Scenario scenario;
  /// "adder" (single) or "adders" (list); the first entry drives simulate.
  std::vector<std::string> adders{"exact:16"};
  SweepPlan sweep;
  OutputConfig output;
};

/// Throws ConfigError; JSON syntax errors carry the byte offset.
[[nodiscard]] CliConfig parse_config(const std::string& text);
[[nodiscard]] CliConfig load_config(const std::filesystem::path& path);

/// Canonical JSON of a configuration (all keys, defaults filled in).
[[nodiscard]] std::string dump_config(const CliConfig& config);

}  // namespace musiclite::cli
