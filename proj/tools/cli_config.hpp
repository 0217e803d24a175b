#pragma once

#include <string>

#include "vkpose/sim.hpp"

namespace vkpose::cli {

/// Configuration error tied to a config key; commands report it on stderr
/// and exit with code 2.
struct ConfigError : Error {
  explicit ConfigError(const std::string& key, const std::string& detail)
      : Error(key + ": " + detail), key(key) {}
  std::string key;
};

/// Fully resolved run configuration (scene + solver + loss + metric settings).
struct CliConfig {
  SceneConfig scene;
  AveragingParams averaging;
  MetricThresholds thresholds;
  LossWeights weights;
  RefineConfig refine;
  ConsistencyPenalty penalty = ConsistencyPenalty::kAbsolute;
  ExperimentMode mode = ExperimentMode::kInference;
};

/// Parses the flat key-value JSON config. Unknown keys, wrong types and
/// out-of-range values raise ConfigError naming the key.
CliConfig parse_config(const std::string& json_text);

/// Serializes the resolved configuration back to flat JSON (the config echo
/// embedded in summaries).
std::string config_echo_json(const CliConfig& config);

std::string distribution_name(const KeypointDistribution& d);

}  // namespace vkpose::cli
