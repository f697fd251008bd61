#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "svcnet/centrality.hpp"
#include "svcnet/io.hpp"
#include "svcnet/stats.hpp"

namespace svcnet {

/// Invalid configuration or missing required input; always fatal.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr std::string_view kOutputDirEnv = "SVCNET_OUTPUT_DIR";
inline constexpr std::string_view kDefaultOutputDir = "svcnet-out";

struct RunConfig {
  std::filesystem::path sdg_path;
  std::optional<std::filesystem::path> metrics_path;
  std::optional<std::filesystem::path> mapping_path;
  std::optional<std::filesystem::path> descriptors_path;
  std::optional<std::filesystem::path> rules_path;
  double alpha = kDefaultAlpha;
  double ad_level = kDefaultAdLevel;
  std::filesystem::path output_dir{std::string(kDefaultOutputDir)};
  bool raw_degree = false;
  DistanceDirection closeness_direction = DistanceDirection::Incoming;
  Correction correction = Correction::None;
  /// Reject self-loops and repeated edges instead of dropping them.
  bool strict_graph = false;

  /// Throws ConfigError.
  void validate() const;

  /// Sets one key from its textual form (config file or flag spelling).
  /// Throws ConfigError on an unknown key or a malformed value.
  void set(std::string_view key, std::string_view value);
};

struct ConfigKey {
  std::string key;
  std::string default_value;
  std::string description;
};

/// Every RunConfig key with its default rendered from RunConfig{}.
std::vector<ConfigKey> config_keys();

/// `key = value` lines; blank lines and lines starting with '#' are skipped.
/// Keys are those of config_keys().
void apply_config_file(RunConfig& config, std::string_view text);

enum class Command { Preprocess, Centrality, Correlate, Detect, Analyze };

std::string_view to_string(Command c);

enum ExitCode : int { kExitOk = 0, kExitPartial = 1, kExitFatal = 2 };

struct RunResult {
  int exit_code = kExitOk;
  /// Files written, relative to the output directory.
  std::vector<std::string> files;
  /// Single-line JSON summary for standard output.
  std::string summary;
};

/// Runs one stage or the full pipeline. Input errors never escape: they
/// become exit code 2 with the message in the summary and the log.
RunResult run(Command command, const RunConfig& config);

}  // namespace svcnet
