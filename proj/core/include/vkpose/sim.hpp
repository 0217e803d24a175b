#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vkpose/alignment.hpp"
#include "vkpose/geometry.hpp"
#include "vkpose/keypoints.hpp"
#include "vkpose/losses.hpp"
#include "vkpose/metrics.hpp"

namespace vkpose {

/// Scene-generation and experiment parameters.
struct SceneConfig {
  int n_keypoints = 8;
  KeypointDistribution distribution = KeypointDistribution::regular();
  double keypoint_scale = 1.0;  // scene units
  CameraIntrinsics intrinsics{600.0, 600.0, 320.0, 240.0};
  double depth_min = 2.0;
  double depth_max = 6.0;
  double baseline_min = 0.1;
  double baseline_max = 0.5;
  double max_pair_rotation_deg = 30.0;
  double pixel_noise_sigma = 0.0;
  /// Optional per-keypoint noise inflation (occlusion surrogate); empty means
  /// all ones, otherwise must have n_keypoints entries.
  std::vector<double> noise_multipliers;
  int n_reference_views = 1;
  int n_trials = 100;
  std::uint64_t base_seed = 0;
  bool symmetric = false;

  void validate() const;  // throws InvalidValue naming the offending field
};

/// One synthetic two-view instance. The virtual keypoints live in their own
/// frame F_p; their camera-1 placement is gt_object_pose_in_c1 composed with
/// the per-trial offset virtual_offset (the true T_a, object <- virtual).
struct ScenePair {
  std::uint64_t seed = 0;
  CameraIntrinsics k1;
  CameraIntrinsics k2;
  RigidTransform gt_object_pose_in_c1;  // ^{C1}T_o
  RigidTransform gt_object_pose_in_c2;  // ^{C2}T_o
  RigidTransform c1_T_c2;
  RigidTransform virtual_offset;        // true T_a
  KeypointSet3D virtual_points;         // in F_p, already scaled
  KeypointSet2D exact_kps1;
  KeypointSet2D exact_kps2;
  KeypointSet2D noisy_kps1;
  KeypointSet2D noisy_kps2;

  RigidTransform virtual_pose_in_c1() const {
    return compose(gt_object_pose_in_c1, virtual_offset);
  }
  RigidTransform virtual_pose_in_c2() const {
    return compose(gt_object_pose_in_c2, virtual_offset);
  }
  /// The virtual keypoints expressed in the object frame; the model surrogate
  /// used for ADD/ADD-S/projection metrics.
  ModelPoints model_in_object_frame() const;
};

/// Query scene plus reference scenes sharing the same virtual keypoints and
/// offset (one object, several viewpoints).
struct TrialScenes {
  ScenePair query;
  std::vector<ScenePair> references;
};

/// Samples one scene: the object pose is a Haar rotation with translation in
/// the view frustum at a depth in [depth_min, depth_max]; the second camera
/// differs by a rotation of at most max_pair_rotation_deg and a baseline in
/// [baseline_min, baseline_max]; everything is re-sampled (at most 100
/// attempts, then SamplingExhausted) until all keypoints project in front of
/// both cameras. Detections are the exact projections plus i.i.d. Gaussian
/// pixel noise of pixel_noise_sigma (times the per-keypoint multiplier).
/// Deterministic per (cfg, trial_seed).
ScenePair sample_scene(const SceneConfig& cfg, std::uint64_t trial_seed);

/// Same, but also samples `n_references` extra viewpoints of the same object.
TrialScenes sample_trial_scenes(const SceneConfig& cfg,
                                std::uint64_t trial_seed, int n_references);

/// Per-trial outcome with all metric values and pass flags.
struct TrialReport {
  int trial_index = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string failure_reason;  // empty when the trial succeeded
  RigidTransform estimate;     // meaningful only when !failed
  TrialVerdict verdict;        // NaN values and false flags when failed
  // Surrogate-mode extras; NaN in inference mode.
  double initial_loss = std::numeric_limits<double>::quiet_NaN();
  double final_loss = std::numeric_limits<double>::quiet_NaN();
};

/// The inference chain of the offset-transform method: PnP on each reference
/// view gives ^{C1}T_p, the reference's ground-truth label gives a T_a
/// candidate, candidates are robustly averaged when there are several, PnP on
/// the query detections gives ^{C2}T_p, and the query pose follows from the
/// offset. Solver failures produce a failed report (all flags false, reason
/// recorded) rather than propagating.
TrialReport run_inference_trial(const ScenePair& scene,
                                const std::vector<ScenePair>& reference_scenes,
                                const AveragingParams& params,
                                const MetricThresholds& th,
                                bool symmetric = false);

struct SurrogateOutcome {
  RefineResult refine;
  TrialReport report;
};

/// Training surrogate: refines the noisy detections of both views under the
/// weak-supervision objective, then runs the inference chain with the scene's
/// own first view as a noiseless reference and the refined second-view
/// detections as the query.
SurrogateOutcome run_training_surrogate_trial(
    const ScenePair& scene, const LossWeights& w, const RefineConfig& cfg,
    const MetricThresholds& th = {},
    ConsistencyPenalty penalty = ConsistencyPenalty::kAbsolute,
    bool symmetric = false);

enum class ExperimentMode { kInference, kSurrogate };

struct ExperimentParams {
  AveragingParams averaging;
  MetricThresholds thresholds;
  LossWeights weights;
  RefineConfig refine;
  ConsistencyPenalty penalty = ConsistencyPenalty::kAbsolute;
  ExperimentMode mode = ExperimentMode::kInference;
  /// Trial-parallelism cap; 0 means the hardware default.
  int max_threads = 0;
};

struct ExperimentSummary {
  int n_trials = 0;
  int n_failed = 0;
  double pass_rate_add = 0.0;
  double pass_rate_adds = 0.0;
  double pass_rate_proj = 0.0;
  double pass_rate_degcm = 0.0;
  // Percentiles over successful trials (NaN when none).
  double median_rot_deg, p90_rot_deg;
  double median_trans, p90_trans;
  double median_add, p90_add;
  double median_adds, p90_adds;
  double median_proj_px, p90_proj_px;
  // Surrogate mode only (NaN otherwise).
  double median_initial_loss, median_final_loss;
  double loss_reduced_fraction;
};

struct ExperimentReport {
  std::vector<TrialReport> trials;
  ExperimentSummary summary;
};

/// Runs cfg.n_trials independent trials, one seed per trial derived as
/// mix_seed(base_seed, index), optionally in parallel. Reports are
/// bit-identical for a given config regardless of the thread count. Failed
/// trials are counted, never fatal.
ExperimentReport run_experiment(const SceneConfig& cfg,
                                const ExperimentParams& params);

/// Interpolated percentile (q in [0, 1]) of an unsorted sample; NaN when
/// empty.
double percentile(std::vector<double> values, double q);

}  // namespace vkpose
