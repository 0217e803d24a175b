#pragma once

#include <string>
#include <vector>

#include "vkpose/sim.hpp"

namespace vkpose {

/// Shortest-faithful formatting with 9 significant digits ("%.9g"); NaN
/// prints as "nan".
std::string format_double(double v);

/// Fixed per-trial CSV header.
inline constexpr const char* kTrialCsvHeader =
    "trial,seed,rot_deg,trans,add,adds,proj_px,pass_add,pass_proj,"
    "pass_degcm,failed_reason";

/// RFC-4180 per-trial table (CRLF rows, header above, flags as 0/1).
std::string trial_csv(const std::vector<TrialReport>& trials);

/// Quotes a CSV field when it contains a comma, quote or line break.
std::string csv_escape(const std::string& field);

}  // namespace vkpose
