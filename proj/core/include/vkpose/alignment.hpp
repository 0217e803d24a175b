#pragma once

#include <cstdint>
#include <vector>

#include "vkpose/geometry.hpp"

namespace vkpose {

/// Parameters of the robust transform-averaging loop.
struct AveragingParams {
  double rot_threshold = 0.1;     // t_r, radians
  double trans_threshold = 0.05;  // t_t, scene units
  double confidence = 0.99;       // eta, in (0, 1)
  int max_iterations = 100;       // RANSAC iteration cap
  double mean_tolerance = 1e-9;   // epsilon, geodesic-mean convergence
  int max_mean_steps = 100;

  void validate() const;  // throws InvalidValue
};

/// Least-squares rigid transform T minimizing sum |dst_i - T(src_i)|^2 over
/// index-aligned sets (SVD of the cross-covariance, reflection corrected so
/// det(R) = +1). Throws TooFewPoints (< 3) and DegenerateConfiguration when
/// the centered configuration is collinear.
RigidTransform kabsch(const KeypointSet3D& src, const KeypointSet3D& dst);

/// Offset transform from the virtual-keypoint frame to the object frame,
/// T_a = inverse(c1_T_o) * inverse(p_T_c1). Fixed across viewpoints.
RigidTransform offset_transform(const RigidTransform& c1_T_o,
                                const RigidTransform& p_T_c1);

/// Object pose in the query camera, c2_T_o = inverse(p_T_c2) * inverse(t_a).
RigidTransform query_pose(const RigidTransform& p_T_c2,
                          const RigidTransform& t_a);

struct AveragedTransform {
  RigidTransform transform;
  std::vector<int> inliers;  // indices into the input list
  int ransac_iterations = 0;
  int mean_steps = 0;
};

/// Robust average of rigid transforms: RANSAC over single-sample hypotheses
/// (inlier when both the geodesic rotation distance and the translation
/// distance to the hypothesis are below the thresholds, early exit once
/// 1 - (1 - r)^iter exceeds the confidence), then the geodesic L2-mean of the
/// inlier rotations (iterated log-mean-exp seeded from the winning
/// hypothesis) and the arithmetic mean of the inlier translations.
/// Deterministic per seed. Throws EmptyInput.
AveragedTransform average_offset(const std::vector<RigidTransform>& transforms,
                                 const AveragingParams& params,
                                 std::uint64_t rng_seed);

/// Reference-pose labeling from >= 4 manually matched correspondences:
/// triangulates each pair with the known relative pose, re-expresses the 3D
/// points in the user-chosen object frame (`frame` maps camera-1 coordinates
/// to object coordinates), and solves PnP against the first view. Returns
/// c1_T_o. Throws TooFewCorrespondences (< 4); triangulation and PnP errors
/// propagate.
RigidTransform reference_pose_from_correspondences(
    const KeypointSet2D& kps1, const KeypointSet2D& kps2,
    const CameraIntrinsics& k1, const CameraIntrinsics& k2,
    const RigidTransform& c1_T_c2, const RigidTransform& frame);

}  // namespace vkpose
