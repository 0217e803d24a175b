#include "commands.hpp"

#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "vkpose/report.hpp"

namespace vkpose::cli {

namespace {

using nlohmann::json;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return buf.str();
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out << content;
  out.flush();
  return out.good();
}

/// POSE_SIM_THREADS caps trial parallelism; unset or empty means the
/// implementation default (0).
int thread_cap_from_env() {
  const char* raw = std::getenv("POSE_SIM_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  long v = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || v < 1) {
    throw ConfigError("POSE_SIM_THREADS", "must be a positive integer");
  }
  return static_cast<int>(v);
}

ExperimentParams experiment_params(const CliConfig& c) {
  ExperimentParams p;
  p.averaging = c.averaging;
  p.thresholds = c.thresholds;
  p.weights = c.weights;
  p.refine = c.refine;
  p.penalty = c.penalty;
  p.mode = c.mode;
  p.max_threads = thread_cap_from_env();
  return p;
}

json summary_fields(const ExperimentReport& report) {
  const ExperimentSummary& s = report.summary;
  json out;
  out["n_trials"] = s.n_trials;
  out["n_failed"] = s.n_failed;
  out["pass_rate_add"] = s.pass_rate_add;
  out["pass_rate_adds"] = s.pass_rate_adds;
  out["pass_rate_proj"] = s.pass_rate_proj;
  out["pass_rate_degcm"] = s.pass_rate_degcm;
  out["median_rot_deg"] = s.median_rot_deg;
  out["p90_rot_deg"] = s.p90_rot_deg;
  out["median_trans"] = s.median_trans;
  out["p90_trans"] = s.p90_trans;
  out["median_add"] = s.median_add;
  out["p90_add"] = s.p90_add;
  out["median_adds"] = s.median_adds;
  out["p90_adds"] = s.p90_adds;
  out["median_proj_px"] = s.median_proj_px;
  out["p90_proj_px"] = s.p90_proj_px;
  return out;
}

std::string sweep_row(const std::string& param, const std::string& value,
                      const ExperimentSummary& s) {
  std::string row;
  row += csv_escape(param);
  row += ',';
  row += csv_escape(value);
  row += ',';
  row += std::to_string(s.n_trials);
  row += ',';
  row += std::to_string(s.n_failed);
  for (double v : {s.pass_rate_add, s.pass_rate_adds, s.pass_rate_proj,
                   s.pass_rate_degcm, s.median_rot_deg, s.p90_rot_deg,
                   s.median_trans, s.p90_trans, s.median_add, s.p90_add,
                   s.median_adds, s.p90_adds, s.median_proj_px,
                   s.p90_proj_px}) {
    row += ',';
    row += format_double(v);
  }
  row += "\r\n";
  return row;
}

void apply_sweep_value(CliConfig& config, const std::string& param,
                       const std::string& value) {
  auto as_int = [&](const std::string& v) {
    try {
      std::size_t pos = 0;
      int out = std::stoi(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return out;
    } catch (const std::exception&) {
      throw ConfigError(param, "invalid integer value '" + value + "'");
    }
  };
  auto as_double = [&](const std::string& v) {
    try {
      std::size_t pos = 0;
      double out = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return out;
    } catch (const std::exception&) {
      throw ConfigError(param, "invalid numeric value '" + value + "'");
    }
  };

  if (param == "n_keypoints") {
    config.scene.n_keypoints = as_int(value);
  } else if (param == "distribution") {
    if (value == "regular") {
      config.scene.distribution.kind = KeypointDistribution::Kind::kRegular;
    } else if (value == "r-sphere") {
      config.scene.distribution.kind = KeypointDistribution::Kind::kRSphere;
    } else if (value == "r-volume") {
      config.scene.distribution.kind = KeypointDistribution::Kind::kRVolume;
    } else {
      throw ConfigError(param, "unknown distribution '" + value + "'");
    }
  } else if (param == "pixel_noise_sigma") {
    config.scene.pixel_noise_sigma = as_double(value);
  } else if (param == "n_reference_views") {
    config.scene.n_reference_views = as_int(value);
  } else {
    throw ConfigError("param", "unknown sweep parameter '" + param + "'");
  }
  try {
    config.scene.validate();
  } catch (const InvalidValue& e) {
    throw ConfigError(param, e.what());
  }
}

}  // namespace

std::string summary_json(const CliConfig& config,
                         const ExperimentReport& report) {
  json out = summary_fields(report);
  out["config"] = json::parse(config_echo_json(config));
  out["mode"] =
      config.mode == ExperimentMode::kInference ? "inference" : "surrogate";
  if (config.mode == ExperimentMode::kSurrogate) {
    out["median_initial_loss"] = report.summary.median_initial_loss;
    out["median_final_loss"] = report.summary.median_final_loss;
    out["loss_reduced_fraction"] = report.summary.loss_reduced_fraction;
  }
  return out.dump(2) + "\n";
}

int cmd_simulate(const std::string& config_path, const std::string& out_csv,
                 const std::string& out_json, std::ostream& err) {
  std::optional<std::string> text = read_file(config_path);
  if (!text) {
    err << "error: cannot read config file '" << config_path << "'\n";
    return 3;
  }
  try {
    CliConfig config = parse_config(*text);
    ExperimentReport report = run_experiment(config.scene,
                                             experiment_params(config));
    if (!write_file(out_csv, trial_csv(report.trials))) {
      err << "error: cannot write '" << out_csv << "'\n";
      return 3;
    }
    if (!write_file(out_json, summary_json(config, report))) {
      err << "error: cannot write '" << out_json << "'\n";
      return 3;
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidValue& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::vector<std::string>& values,
              const std::string& out_csv, std::ostream& err) {
  std::optional<std::string> text = read_file(config_path);
  if (!text) {
    err << "error: cannot read config file '" << config_path << "'\n";
    return 3;
  }
  try {
    CliConfig base = parse_config(*text);
    if (values.empty()) {
      throw ConfigError("values", "empty value list");
    }
    std::string csv = std::string(kSweepCsvHeader) + "\r\n";
    for (const std::string& value : values) {
      CliConfig config = base;
      apply_sweep_value(config, param, value);
      ExperimentReport report =
          run_experiment(config.scene, experiment_params(config));
      csv += sweep_row(param, value, report.summary);
    }
    if (!write_file(out_csv, csv)) {
      err << "error: cannot write '" << out_csv << "'\n";
      return 3;
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidValue& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace vkpose::cli
