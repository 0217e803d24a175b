#pragma once

#include <iostream>
#include <string>
#include <vector>

#include "cli_config.hpp"

namespace vkpose::cli {

/// Summary JSON: config echo, trial counts, per-criterion pass rates and
/// median/p90 of each error (plus loss statistics in surrogate mode).
std::string summary_json(const CliConfig& config,
                         const ExperimentReport& report);

inline constexpr const char* kSweepCsvHeader =
    "param,value,n_trials,n_failed,pass_rate_add,pass_rate_adds,"
    "pass_rate_proj,pass_rate_degcm,median_rot_deg,p90_rot_deg,median_trans,"
    "p90_trans,median_add,p90_add,median_adds,p90_adds,median_proj_px,"
    "p90_proj_px";

/// Runs one experiment and writes the per-trial CSV and summary JSON.
/// Returns 0 on success, 2 on configuration errors (message on `err` names
/// the offending key), 3 on I/O errors.
int cmd_simulate(const std::string& config_path, const std::string& out_csv,
                 const std::string& out_json, std::ostream& err = std::cerr);

/// Runs one experiment per value of the swept parameter (n_keypoints,
/// distribution, pixel_noise_sigma or n_reference_views) and writes one
/// summary row per value. Exit codes as in cmd_simulate.
int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::vector<std::string>& values,
              const std::string& out_csv, std::ostream& err = std::cerr);

}  // namespace vkpose::cli
