#pragma once

#include <cstdint>

#include "vkpose/geometry.hpp"

namespace vkpose {

/// Index-aligned 2D-3D correspondences for pose estimation.
struct Correspondences {
  KeypointSet3D points3d;
  KeypointSet2D points2d;

  std::size_t size() const { return points3d.size(); }
  void validate() const;  // equal lengths
};

/// Root-mean-square reprojection error in pixels. Throws BehindCamera when a
/// point has non-positive depth under the pose.
double reprojection_rmse(const Correspondences& c, const CameraIntrinsics& k,
                         const RigidTransform& pose);

/// Linear (DLT) estimate of the camera-from-object transform from >= 6
/// correspondences spanning three dimensions. The rotation block is projected
/// to the nearest rotation (SVD, determinant corrected). Throws TooFewPoints
/// (< 6) and DegenerateConfiguration (coplanar/collinear points).
RigidTransform pnp_dlt(const Correspondences& c, const CameraIntrinsics& k);

struct PnpRefineResult {
  RigidTransform pose;
  double rmse = 0.0;     // reprojection RMSE of `pose`, pixels
  int iterations = 0;
  bool converged = false;
};

/// Gauss-Newton on mean squared reprojection error, pose updated by a
/// left-multiplicative axis-angle increment and an additive translation, with
/// step halving when the error would increase. Stops after 50 iterations or
/// when the step norm drops below 1e-12. The returned RMSE never exceeds the
/// initial one. `converged` is false when iteration had to stop because no
/// evaluable step remained (points behind the camera). The initial pose must
/// place all points at positive depth (throws BehindCamera otherwise).
PnpRefineResult pnp_refine(const Correspondences& c, const CameraIntrinsics& k,
                           const RigidTransform& init);

/// Full solver: for >= 6 non-degenerate points, DLT then refinement; for 4-5
/// points or a degenerate DLT, 32 seeded random restarts (random rotation,
/// translation placing the 3D centroid on the back-projected 2D centroid ray
/// at a log-uniform depth in [0.5, 20]), each refined, best RMSE wins with
/// ties broken by restart index. Throws TooFewPoints (< 4) and NoSolution
/// when every restart fails.
RigidTransform solve_pnp(const Correspondences& c, const CameraIntrinsics& k,
                         std::uint64_t rng_seed);

}  // namespace vkpose
