#include "vkpose/sim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "vkpose/pnp.hpp"
#include "vkpose/rng.hpp"

namespace vkpose {

namespace {

constexpr int kMaxSceneAttempts = 100;
// Radius of the ball the true offset translation is drawn from. The offset
// only has to be a generic rigid transform; a modest one keeps the virtual
// keypoints near the sampled frustum position.
constexpr double kOffsetTranslationRadius = 0.25;

// Stream tags for the deterministic per-trial sub-seeds.
constexpr std::uint64_t kTagReferencePnp = 0x1000;
constexpr std::uint64_t kTagQueryPnp = 0x2000;
constexpr std::uint64_t kTagAveraging = 0x3000;

struct ObjectInstance {
  KeypointSet3D virtual_points;
  RigidTransform virtual_offset;
};

ObjectInstance sample_object(const SceneConfig& cfg, Rng& rng) {
  std::uint64_t kp_seed = rng.next_u64();
  KeypointSet3D pts =
      generate_virtual_keypoints(cfg.n_keypoints, cfg.distribution, kp_seed);
  for (auto& p : pts) p *= cfg.keypoint_scale;
  RigidTransform offset =
      random_rigid_transform(rng, kOffsetTranslationRadius);
  return {std::move(pts), offset};
}

ScenePair sample_scene_of(const SceneConfig& cfg, const ObjectInstance& obj,
                          Rng& rng, std::uint64_t seed) {
  ScenePair s;
  s.seed = seed;
  s.k1 = cfg.intrinsics;
  s.k2 = cfg.intrinsics;
  s.virtual_points = obj.virtual_points;
  s.virtual_offset = obj.virtual_offset;

  const double max_rot = cfg.max_pair_rotation_deg * M_PI / 180.0;
  for (int attempt = 0; attempt < kMaxSceneAttempts; ++attempt) {
    Rotation obj_rot = random_rotation(rng);
    double u = rng.uniform(0.0, 2.0 * cfg.intrinsics.cx);
    double v = rng.uniform(0.0, 2.0 * cfg.intrinsics.cy);
    double z = rng.uniform(cfg.depth_min, cfg.depth_max);
    Vec3 t(z * (u - cfg.intrinsics.cx) / cfg.intrinsics.fx,
           z * (v - cfg.intrinsics.cy) / cfg.intrinsics.fy, z);
    s.gt_object_pose_in_c1 = {obj_rot, t};

    Rotation pair_rot = so3_exp(rng.uniform(0.0, max_rot) * rng.unit_vector());
    Vec3 baseline =
        rng.uniform(cfg.baseline_min, cfg.baseline_max) * rng.unit_vector();
    s.c1_T_c2 = {pair_rot, baseline};
    s.gt_object_pose_in_c2 =
        compose(s.c1_T_c2.inverse(), s.gt_object_pose_in_c1);

    RigidTransform pose1 = s.virtual_pose_in_c1();
    RigidTransform pose2 = s.virtual_pose_in_c2();
    KeypointSet2D kp1, kp2;
    kp1.reserve(s.virtual_points.size());
    kp2.reserve(s.virtual_points.size());
    bool visible = true;
    for (const auto& p : s.virtual_points) {
      try {
        kp1.push_back(project(s.k1, pose1, p));
        kp2.push_back(project(s.k2, pose2, p));
      } catch (const BehindCamera&) {
        visible = false;
        break;
      }
    }
    if (!visible) continue;

    s.exact_kps1 = std::move(kp1);
    s.exact_kps2 = std::move(kp2);
    s.noisy_kps1 = s.exact_kps1;
    s.noisy_kps2 = s.exact_kps2;
    for (std::size_t i = 0; i < s.exact_kps1.size(); ++i) {
      double sigma = cfg.pixel_noise_sigma;
      if (!cfg.noise_multipliers.empty()) sigma *= cfg.noise_multipliers[i];
      s.noisy_kps1[i] += sigma * Point2(rng.normal(), rng.normal());
      s.noisy_kps2[i] += sigma * Point2(rng.normal(), rng.normal());
    }
    return s;
  }
  throw SamplingExhausted(
      "sample_scene: could not place all keypoints in front of both cameras "
      "after 100 attempts");
}

std::vector<double> collect(const std::vector<TrialReport>& trials,
                            double TrialVerdict::*field) {
  std::vector<double> vals;
  vals.reserve(trials.size());
  for (const auto& t : trials) {
    if (!t.failed) vals.push_back(t.verdict.*field);
  }
  return vals;
}

ExperimentSummary summarize(const std::vector<TrialReport>& trials,
                            ExperimentMode mode) {
  ExperimentSummary s{};
  s.n_trials = static_cast<int>(trials.size());
  int add = 0, adds = 0, proj = 0, degcm = 0;
  for (const auto& t : trials) {
    if (t.failed) ++s.n_failed;
    add += t.verdict.pass_add;
    adds += t.verdict.pass_adds;
    proj += t.verdict.pass_proj;
    degcm += t.verdict.pass_degcm;
  }
  const double n = std::max(1, s.n_trials);
  s.pass_rate_add = add / n;
  s.pass_rate_adds = adds / n;
  s.pass_rate_proj = proj / n;
  s.pass_rate_degcm = degcm / n;

  s.median_rot_deg = percentile(collect(trials, &TrialVerdict::rot_deg), 0.5);
  s.p90_rot_deg = percentile(collect(trials, &TrialVerdict::rot_deg), 0.9);
  s.median_trans = percentile(collect(trials, &TrialVerdict::trans), 0.5);
  s.p90_trans = percentile(collect(trials, &TrialVerdict::trans), 0.9);
  s.median_add = percentile(collect(trials, &TrialVerdict::add), 0.5);
  s.p90_add = percentile(collect(trials, &TrialVerdict::add), 0.9);
  s.median_adds = percentile(collect(trials, &TrialVerdict::adds), 0.5);
  s.p90_adds = percentile(collect(trials, &TrialVerdict::adds), 0.9);
  s.median_proj_px = percentile(collect(trials, &TrialVerdict::proj_px), 0.5);
  s.p90_proj_px = percentile(collect(trials, &TrialVerdict::proj_px), 0.9);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.median_initial_loss = nan;
  s.median_final_loss = nan;
  s.loss_reduced_fraction = nan;
  if (mode == ExperimentMode::kSurrogate) {
    std::vector<double> init, fin;
    int reduced = 0, counted = 0;
    for (const auto& t : trials) {
      if (t.failed || std::isnan(t.initial_loss)) continue;
      init.push_back(t.initial_loss);
      fin.push_back(t.final_loss);
      ++counted;
      if (t.final_loss < t.initial_loss) ++reduced;
    }
    s.median_initial_loss = percentile(init, 0.5);
    s.median_final_loss = percentile(fin, 0.5);
    s.loss_reduced_fraction = counted ? static_cast<double>(reduced) / counted : nan;
  }
  return s;
}

}  // namespace

void SceneConfig::validate() const {
  if (n_keypoints < 4) throw InvalidValue("n_keypoints: must be >= 4");
  if (distribution.kind == KeypointDistribution::Kind::kRegular &&
      n_keypoints != 4 && n_keypoints != 6 && n_keypoints != 8 &&
      n_keypoints != 12) {
    throw InvalidValue(
        "n_keypoints: regular distribution supports only 4, 6, 8 or 12");
  }
  if (!(distribution.param > 0.0)) {
    throw InvalidValue("distribution_param: must be > 0");
  }
  if (!(keypoint_scale > 0.0)) throw InvalidValue("keypoint_scale: must be > 0");
  if (!(depth_min > 0.0)) throw InvalidValue("depth_min: must be > 0");
  if (!(depth_max >= depth_min)) {
    throw InvalidValue("depth_max: must be >= depth_min");
  }
  if (!(baseline_min > 0.0)) throw InvalidValue("baseline_min: must be > 0");
  if (!(baseline_max >= baseline_min)) {
    throw InvalidValue("baseline_max: must be >= baseline_min");
  }
  if (!(max_pair_rotation_deg >= 0.0)) {
    throw InvalidValue("max_pair_rotation_deg: must be >= 0");
  }
  if (!(pixel_noise_sigma >= 0.0)) {
    throw InvalidValue("pixel_noise_sigma: must be >= 0");
  }
  if (!noise_multipliers.empty() &&
      noise_multipliers.size() != static_cast<std::size_t>(n_keypoints)) {
    throw InvalidValue("noise_multipliers: needs one entry per keypoint");
  }
  for (double m : noise_multipliers) {
    if (!(m >= 0.0)) throw InvalidValue("noise_multipliers: must be >= 0");
  }
  if (n_reference_views < 1) {
    throw InvalidValue("n_reference_views: must be >= 1");
  }
  if (n_trials < 1) throw InvalidValue("n_trials: must be >= 1");
}

ModelPoints ScenePair::model_in_object_frame() const {
  std::vector<Point3> pts;
  pts.reserve(virtual_points.size());
  for (const auto& p : virtual_points) pts.push_back(virtual_offset * p);
  return ModelPoints(std::move(pts));
}

ScenePair sample_scene(const SceneConfig& cfg, std::uint64_t trial_seed) {
  return sample_trial_scenes(cfg, trial_seed, 0).query;
}

TrialScenes sample_trial_scenes(const SceneConfig& cfg,
                                std::uint64_t trial_seed, int n_references) {
  cfg.validate();
  Rng rng(trial_seed);
  ObjectInstance obj = sample_object(cfg, rng);
  TrialScenes out{sample_scene_of(cfg, obj, rng, trial_seed), {}};
  out.references.reserve(n_references);
  for (int i = 0; i < n_references; ++i) {
    out.references.push_back(sample_scene_of(cfg, obj, rng, trial_seed));
  }
  return out;
}

TrialReport run_inference_trial(const ScenePair& scene,
                                const std::vector<ScenePair>& reference_scenes,
                                const AveragingParams& params,
                                const MetricThresholds& th, bool symmetric) {
  TrialReport report;
  report.seed = scene.seed;
  if (reference_scenes.empty()) {
    report.failed = true;
    report.failure_reason = "no reference scenes";
    return report;
  }
  try {
    std::vector<RigidTransform> offsets;
    offsets.reserve(reference_scenes.size());
    for (std::size_t r = 0; r < reference_scenes.size(); ++r) {
      const ScenePair& ref = reference_scenes[r];
      RigidTransform c1_T_p =
          solve_pnp({ref.virtual_points, ref.noisy_kps1}, ref.k1,
                    mix_seed(scene.seed, kTagReferencePnp + r));
      offsets.push_back(
          offset_transform(ref.gt_object_pose_in_c1, c1_T_p.inverse()));
    }
    RigidTransform t_a =
        offsets.size() == 1
            ? offsets.front()
            : average_offset(offsets, params,
                             mix_seed(scene.seed, kTagAveraging))
                  .transform;

    RigidTransform c2_T_p =
        solve_pnp({scene.virtual_points, scene.noisy_kps2}, scene.k2,
                  mix_seed(scene.seed, kTagQueryPnp));
    report.estimate = query_pose(c2_T_p.inverse(), t_a);
    report.verdict = judge(scene.model_in_object_frame(), scene.k2,
                           report.estimate, scene.gt_object_pose_in_c2, th,
                           symmetric);
  } catch (const Error& e) {
    report.failed = true;
    report.failure_reason = e.what();
    report.verdict = TrialVerdict{};
  }
  return report;
}

SurrogateOutcome run_training_surrogate_trial(const ScenePair& scene,
                                              const LossWeights& w,
                                              const RefineConfig& cfg,
                                              const MetricThresholds& th,
                                              ConsistencyPenalty penalty,
                                              bool symmetric) {
  SurrogateOutcome out;
  out.report.seed = scene.seed;
  try {
    out.refine =
        refine_keypoints(scene.noisy_kps1, scene.noisy_kps2,
                         scene.virtual_points, scene.k1, scene.k2,
                         scene.c1_T_c2, w, cfg, penalty);
    out.report.initial_loss = out.refine.initial_loss;
    out.report.final_loss = out.refine.final_loss;

    // Noiseless reference: the scene's own first view with exact detections.
    RigidTransform c1_T_p =
        solve_pnp({scene.virtual_points, scene.exact_kps1}, scene.k1,
                  mix_seed(scene.seed, kTagReferencePnp));
    RigidTransform t_a =
        offset_transform(scene.gt_object_pose_in_c1, c1_T_p.inverse());
    RigidTransform c2_T_p =
        solve_pnp({scene.virtual_points, out.refine.kps2}, scene.k2,
                  mix_seed(scene.seed, kTagQueryPnp));
    out.report.estimate = query_pose(c2_T_p.inverse(), t_a);
    out.report.verdict = judge(scene.model_in_object_frame(), scene.k2,
                               out.report.estimate,
                               scene.gt_object_pose_in_c2, th, symmetric);
  } catch (const Error& e) {
    out.report.failed = true;
    out.report.failure_reason = e.what();
    out.report.verdict = TrialVerdict{};
  }
  return out;
}

ExperimentReport run_experiment(const SceneConfig& cfg,
                                const ExperimentParams& params) {
  cfg.validate();
  params.averaging.validate();
  params.thresholds.validate();
  params.weights.validate();
  params.refine.validate();

  std::vector<TrialReport> trials(cfg.n_trials);
  auto run_one = [&](int index) {
    std::uint64_t seed = mix_seed(cfg.base_seed, index);
    TrialReport report;
    try {
      if (params.mode == ExperimentMode::kInference) {
        TrialScenes scenes =
            sample_trial_scenes(cfg, seed, cfg.n_reference_views);
        report = run_inference_trial(scenes.query, scenes.references,
                                     params.averaging, params.thresholds,
                                     cfg.symmetric);
      } else {
        ScenePair scene = sample_scene(cfg, seed);
        report = run_training_surrogate_trial(scene, params.weights,
                                              params.refine, params.thresholds,
                                              params.penalty, cfg.symmetric)
                     .report;
      }
    } catch (const Error& e) {
      report.seed = seed;
      report.failed = true;
      report.failure_reason = e.what();
    }
    report.trial_index = index;
    trials[index] = std::move(report);
  };

  int threads = params.max_threads > 0
                    ? params.max_threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, cfg.n_trials);
  if (threads == 1) {
    for (int i = 0; i < cfg.n_trials; ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (int i = t; i < cfg.n_trials; i += threads) run_one(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  ExperimentReport report{std::move(trials), {}};
  report.summary = summarize(report.trials, params.mode);
  return report;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  double pos = q * static_cast<double>(values.size() - 1);
  auto lo = static_cast<std::size_t>(pos);
  auto hi = std::min(lo + 1, values.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace vkpose
