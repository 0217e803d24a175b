#include "cli_config.hpp"

#include <json.hpp>

namespace vkpose::cli {

namespace {

using nlohmann::json;

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
  return v.get<int>();
}

std::uint64_t as_u64(const json& v, const std::string& key) {
  if (!(v.is_number_unsigned() ||
        (v.is_number_integer() && v.get<std::int64_t>() >= 0))) {
    throw ConfigError(key, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool as_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

void require_positive(double v, const std::string& key) {
  if (!(v > 0.0)) throw ConfigError(key, "must be > 0");
}

KeypointDistribution::Kind parse_distribution(const std::string& name) {
  if (name == "regular") return KeypointDistribution::Kind::kRegular;
  if (name == "r-sphere") return KeypointDistribution::Kind::kRSphere;
  if (name == "r-volume") return KeypointDistribution::Kind::kRVolume;
  throw ConfigError("distribution",
                    "must be one of regular, r-sphere, r-volume");
}

}  // namespace

std::string distribution_name(const KeypointDistribution& d) {
  switch (d.kind) {
    case KeypointDistribution::Kind::kRegular: return "regular";
    case KeypointDistribution::Kind::kRSphere: return "r-sphere";
    default: return "r-volume";
  }
}

CliConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config", "must be a JSON object");

  CliConfig c;
  for (const auto& [key, value] : doc.items()) {
    if (key == "n_keypoints") {
      c.scene.n_keypoints = as_int(value, key);
      if (c.scene.n_keypoints < 4) throw ConfigError(key, "must be >= 4");
    } else if (key == "distribution") {
      c.scene.distribution.kind = parse_distribution(as_string(value, key));
    } else if (key == "distribution_param") {
      c.scene.distribution.param = as_double(value, key);
      require_positive(c.scene.distribution.param, key);
    } else if (key == "keypoint_scale") {
      c.scene.keypoint_scale = as_double(value, key);
      require_positive(c.scene.keypoint_scale, key);
    } else if (key == "fx") {
      require_positive(as_double(value, key), key);
      c.scene.intrinsics.fx = value.get<double>();
    } else if (key == "fy") {
      require_positive(as_double(value, key), key);
      c.scene.intrinsics.fy = value.get<double>();
    } else if (key == "cx") {
      c.scene.intrinsics.cx = as_double(value, key);
      require_positive(c.scene.intrinsics.cx, key);
    } else if (key == "cy") {
      c.scene.intrinsics.cy = as_double(value, key);
      require_positive(c.scene.intrinsics.cy, key);
    } else if (key == "depth_min") {
      c.scene.depth_min = as_double(value, key);
      require_positive(c.scene.depth_min, key);
    } else if (key == "depth_max") {
      c.scene.depth_max = as_double(value, key);
      require_positive(c.scene.depth_max, key);
    } else if (key == "baseline_min") {
      c.scene.baseline_min = as_double(value, key);
      require_positive(c.scene.baseline_min, key);
    } else if (key == "baseline_max") {
      c.scene.baseline_max = as_double(value, key);
      require_positive(c.scene.baseline_max, key);
    } else if (key == "max_pair_rotation_deg") {
      c.scene.max_pair_rotation_deg = as_double(value, key);
      if (!(c.scene.max_pair_rotation_deg >= 0.0)) {
        throw ConfigError(key, "must be >= 0");
      }
    } else if (key == "pixel_noise_sigma") {
      c.scene.pixel_noise_sigma = as_double(value, key);
      if (!(c.scene.pixel_noise_sigma >= 0.0)) {
        throw ConfigError(key, "must be >= 0");
      }
    } else if (key == "noise_multipliers") {
      if (!value.is_array()) throw ConfigError(key, "expected an array");
      c.scene.noise_multipliers.clear();
      for (const auto& item : value) {
        double m = as_double(item, key);
        if (!(m >= 0.0)) throw ConfigError(key, "entries must be >= 0");
        c.scene.noise_multipliers.push_back(m);
      }
    } else if (key == "n_reference_views") {
      c.scene.n_reference_views = as_int(value, key);
      if (c.scene.n_reference_views < 1) throw ConfigError(key, "must be >= 1");
    } else if (key == "n_trials") {
      c.scene.n_trials = as_int(value, key);
      if (c.scene.n_trials < 1) throw ConfigError(key, "must be >= 1");
    } else if (key == "base_seed") {
      c.scene.base_seed = as_u64(value, key);
    } else if (key == "symmetric") {
      c.scene.symmetric = as_bool(value, key);
    } else if (key == "mode") {
      std::string m = as_string(value, key);
      if (m == "inference") {
        c.mode = ExperimentMode::kInference;
      } else if (m == "surrogate") {
        c.mode = ExperimentMode::kSurrogate;
      } else {
        throw ConfigError(key, "must be \"inference\" or \"surrogate\"");
      }
    } else if (key == "consistency_squared") {
      c.penalty = as_bool(value, key) ? ConsistencyPenalty::kSquared
                                      : ConsistencyPenalty::kAbsolute;
    } else if (key == "lambda1") {
      c.weights.lambda1 = as_double(value, key);
      if (c.weights.lambda1 < 0.0) throw ConfigError(key, "must be >= 0");
    } else if (key == "lambda2") {
      c.weights.lambda2 = as_double(value, key);
      if (c.weights.lambda2 < 0.0) throw ConfigError(key, "must be >= 0");
    } else if (key == "avg_rot_threshold") {
      c.averaging.rot_threshold = as_double(value, key);
      require_positive(c.averaging.rot_threshold, key);
    } else if (key == "avg_trans_threshold") {
      c.averaging.trans_threshold = as_double(value, key);
      require_positive(c.averaging.trans_threshold, key);
    } else if (key == "avg_confidence") {
      c.averaging.confidence = as_double(value, key);
      if (!(c.averaging.confidence > 0.0 && c.averaging.confidence < 1.0)) {
        throw ConfigError(key, "must be in (0, 1)");
      }
    } else if (key == "avg_max_iter") {
      c.averaging.max_iterations = as_int(value, key);
      if (c.averaging.max_iterations < 1) throw ConfigError(key, "must be >= 1");
    } else if (key == "avg_epsilon") {
      c.averaging.mean_tolerance = as_double(value, key);
      require_positive(c.averaging.mean_tolerance, key);
    } else if (key == "avg_max_step") {
      c.averaging.max_mean_steps = as_int(value, key);
      if (c.averaging.max_mean_steps < 1) throw ConfigError(key, "must be >= 1");
    } else if (key == "add_fraction") {
      c.thresholds.add_fraction = as_double(value, key);
      require_positive(c.thresholds.add_fraction, key);
    } else if (key == "proj_pixels") {
      c.thresholds.proj_pixels = as_double(value, key);
      require_positive(c.thresholds.proj_pixels, key);
    } else if (key == "rot_deg") {
      c.thresholds.rot_deg = as_double(value, key);
      require_positive(c.thresholds.rot_deg, key);
    } else if (key == "trans_cm") {
      c.thresholds.trans_cm = as_double(value, key);
      require_positive(c.thresholds.trans_cm, key);
    } else if (key == "refine_step_size") {
      c.refine.step_size = as_double(value, key);
      require_positive(c.refine.step_size, key);
    } else if (key == "refine_max_iters") {
      c.refine.max_iterations = as_int(value, key);
      if (c.refine.max_iterations < 0) throw ConfigError(key, "must be >= 0");
    } else if (key == "refine_grad_tol") {
      c.refine.grad_tolerance = as_double(value, key);
      require_positive(c.refine.grad_tolerance, key);
    } else if (key == "refine_fd_step") {
      c.refine.fd_step = as_double(value, key);
      require_positive(c.refine.fd_step, key);
    } else {
      throw ConfigError(key, "unknown configuration key");
    }
  }

  try {
    c.scene.validate();
  } catch (const InvalidValue& e) {
    // Scene validation messages already start with the config key.
    std::string msg = e.what();
    auto colon = msg.find(':');
    throw ConfigError(msg.substr(0, colon),
                      colon == std::string::npos ? msg : msg.substr(colon + 2));
  }
  return c;
}

std::string config_echo_json(const CliConfig& c) {
  json echo;
  echo["n_keypoints"] = c.scene.n_keypoints;
  echo["distribution"] = distribution_name(c.scene.distribution);
  echo["distribution_param"] = c.scene.distribution.param;
  echo["keypoint_scale"] = c.scene.keypoint_scale;
  echo["fx"] = c.scene.intrinsics.fx;
  echo["fy"] = c.scene.intrinsics.fy;
  echo["cx"] = c.scene.intrinsics.cx;
  echo["cy"] = c.scene.intrinsics.cy;
  echo["depth_min"] = c.scene.depth_min;
  echo["depth_max"] = c.scene.depth_max;
  echo["baseline_min"] = c.scene.baseline_min;
  echo["baseline_max"] = c.scene.baseline_max;
  echo["max_pair_rotation_deg"] = c.scene.max_pair_rotation_deg;
  echo["pixel_noise_sigma"] = c.scene.pixel_noise_sigma;
  echo["noise_multipliers"] = c.scene.noise_multipliers;
  echo["n_reference_views"] = c.scene.n_reference_views;
  echo["n_trials"] = c.scene.n_trials;
  echo["base_seed"] = c.scene.base_seed;
  echo["symmetric"] = c.scene.symmetric;
  echo["mode"] =
      c.mode == ExperimentMode::kInference ? "inference" : "surrogate";
  echo["consistency_squared"] = c.penalty == ConsistencyPenalty::kSquared;
  echo["lambda1"] = c.weights.lambda1;
  echo["lambda2"] = c.weights.lambda2;
  echo["avg_rot_threshold"] = c.averaging.rot_threshold;
  echo["avg_trans_threshold"] = c.averaging.trans_threshold;
  echo["avg_confidence"] = c.averaging.confidence;
  echo["avg_max_iter"] = c.averaging.max_iterations;
  echo["avg_epsilon"] = c.averaging.mean_tolerance;
  echo["avg_max_step"] = c.averaging.max_mean_steps;
  echo["add_fraction"] = c.thresholds.add_fraction;
  echo["proj_pixels"] = c.thresholds.proj_pixels;
  echo["rot_deg"] = c.thresholds.rot_deg;
  echo["trans_cm"] = c.thresholds.trans_cm;
  echo["refine_step_size"] = c.refine.step_size;
  echo["refine_max_iters"] = c.refine.max_iterations;
  echo["refine_grad_tol"] = c.refine.grad_tolerance;
  echo["refine_fd_step"] = c.refine.fd_step;
  return echo.dump();
}

}  // namespace vkpose::cli
