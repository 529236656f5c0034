#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace holofg {

inline constexpr int kSchemaVersion = 1;

/// Malformed config: wrong type, unknown key, missing input.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Command-line overrides applied on top of the config file.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  /// Directory for the propagator sample cache; empty disables caching.
  std::string cache_dir;
  /// Relative input paths in the config resolve against this directory.
  std::string base_dir = ".";
  /// When nonempty the config's "command" must equal this.
  std::string command;
};

struct RunOutput {
  std::string command;
  /// Deterministic given config and seed: no wall times or cache state.
  std::string json;
  std::string csv;
  /// Additional artifacts (file name, contents).
  std::vector<std::pair<std::string, std::string>> files;
  /// Human-readable notes for stderr.
  std::vector<std::string> log;
  /// 0 on success, 1 when a check or invariance comparison was flagged.
  int exit_code = 0;
};

/// Parses a config ({"schema_version": 1, "command": ..., <command>: {...}})
/// and runs it. Throws ConfigError on schema violations.
RunOutput run_config(const std::string& config_text, const RunOverrides& overrides = {});

/// FNV-1a of the canonical (key-sorted, whitespace-free) form of the config.
std::uint64_t config_hash(const std::string& config_text);

/// Commands accepted in the "command" field.
std::vector<std::string> run_commands();

}  // namespace holofg
