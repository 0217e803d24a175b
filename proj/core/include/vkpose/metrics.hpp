#pragma once

#include <limits>
#include <vector>

#include "vkpose/geometry.hpp"

namespace vkpose {

/// Vertex-set surrogate for the 3D object model.
struct ModelPoints {
  std::vector<Point3> points;

  ModelPoints() = default;
  explicit ModelPoints(std::vector<Point3> pts);
};

/// Correctness thresholds: ADD(-S) below add_fraction of the model diameter,
/// mean reprojection below proj_pixels, rotation/translation errors below
/// rot_deg / trans_cm (the latter in scene units; 0.05 = 5 cm when the scene
/// unit is a meter).
struct MetricThresholds {
  double add_fraction = 0.10;
  double proj_pixels = 5.0;
  double rot_deg = 5.0;
  double trans_cm = 0.05;

  void validate() const;  // throws InvalidValue
};

/// Mean distance between model points under the two poses.
double add_metric(const ModelPoints& m, const RigidTransform& pred,
                  const RigidTransform& gt);

/// Mean nearest-point distance (exact O(n^2)); the symmetric-object variant.
double adds_metric(const ModelPoints& m, const RigidTransform& pred,
                   const RigidTransform& gt);

/// Maximum pairwise vertex distance, exact O(n^2).
double model_diameter(const ModelPoints& m);

/// Mean pixel distance between the projections of the model points under the
/// two poses. Throws BehindCamera if any point has non-positive depth.
double projection_metric(const ModelPoints& m, const CameraIntrinsics& k,
                         const RigidTransform& pred, const RigidTransform& gt);

struct PoseErrors {
  double rot_deg = 0.0;
  double trans = 0.0;
};

/// Geodesic rotation error in degrees and translation error norm.
PoseErrors pose_errors(const RigidTransform& pred, const RigidTransform& gt);

/// All metric values plus the four pass/fail criteria.
struct TrialVerdict {
  double add = std::numeric_limits<double>::quiet_NaN();
  double adds = std::numeric_limits<double>::quiet_NaN();
  double proj_px = std::numeric_limits<double>::quiet_NaN();
  double rot_deg = std::numeric_limits<double>::quiet_NaN();
  double trans = std::numeric_limits<double>::quiet_NaN();
  bool pass_add = false;    // ADD(-S) < add_fraction * diameter; uses ADD-S
                            // when the object is symmetric
  bool pass_adds = false;   // ADD-S < add_fraction * diameter
  bool pass_proj = false;   // projection metric < proj_pixels
  bool pass_degcm = false;  // rot < rot_deg and trans < trans_cm
};

TrialVerdict judge(const ModelPoints& m, const CameraIntrinsics& k,
                   const RigidTransform& pred, const RigidTransform& gt,
                   const MetricThresholds& th, bool symmetric);

}  // namespace vkpose
