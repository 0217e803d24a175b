#include "vkpose/report.hpp"

#include <cmath>
#include <cstdio>

namespace vkpose {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

std::string trial_csv(const std::vector<TrialReport>& trials) {
  std::string out = kTrialCsvHeader;
  out += "\r\n";
  for (const auto& t : trials) {
    out += std::to_string(t.trial_index);
    out += ',';
    out += std::to_string(t.seed);
    out += ',';
    out += format_double(t.verdict.rot_deg);
    out += ',';
    out += format_double(t.verdict.trans);
    out += ',';
    out += format_double(t.verdict.add);
    out += ',';
    out += format_double(t.verdict.adds);
    out += ',';
    out += format_double(t.verdict.proj_px);
    out += ',';
    out += t.verdict.pass_add ? '1' : '0';
    out += ',';
    out += t.verdict.pass_proj ? '1' : '0';
    out += ',';
    out += t.verdict.pass_degcm ? '1' : '0';
    out += ',';
    out += csv_escape(t.failure_reason);
    out += "\r\n";
  }
  return out;
}

}  // namespace vkpose
