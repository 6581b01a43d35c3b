#pragma once

#include <filesystem>
#include <string>

#include "sdecoup/experiment.hpp"

namespace sdecoup {

/// Experiment config plus the drift file reference it was loaded from.
struct LoadedConfig {
    ExperimentConfig experiment;
    std::string drift_file;  // as written in the config (relative paths stay relative)
};

/// Parses a flat "key = value" config file ('#' comments allowed), loads the
/// referenced drift description and range-checks everything. Unknown keys
/// are rejected. Throws ConfigError.
LoadedConfig load_experiment_config(const std::filesystem::path& path);

/// Canonical re-emission of an accepted config; parsing the output yields an
/// equal ExperimentConfig.
std::string emit_experiment_config(const LoadedConfig& cfg);

/// Reads a drift description in the piecewise text format.
PiecewiseLipschitzFn load_drift_file(const std::filesystem::path& path);

bool experiment_configs_equal(const ExperimentConfig& a, const ExperimentConfig& b);

} // namespace sdecoup
