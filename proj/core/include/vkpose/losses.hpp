#pragma once

#include <Eigen/Core>

#include "vkpose/geometry.hpp"
#include "vkpose/twoview.hpp"

namespace vkpose {

/// Weights of the total objective L = lambda1 * L_reg + lambda2 * L_con.
struct LossWeights {
  double lambda1 = 100.0;
  double lambda2 = 100.0;

  void validate() const;  // both >= 0
};

/// Per-term treatment of the signed epipolar residual. The absolute value is
/// the default; the squared form is available as a configuration option.
enum class ConsistencyPenalty { kAbsolute, kSquared };

/// Gradient-descent settings for the keypoint refiner.
struct RefineConfig {
  double step_size = 0.5;      // initial step, pixels per unit gradient
  int max_iterations = 500;
  double grad_tolerance = 1e-8;
  double fd_step = 1e-4;       // finite-difference step, pixels

  void validate() const;
};

struct RegistrationResult {
  double loss = 0.0;
  RigidTransform transform;  // the Kabsch alignment T_o used by the loss
};

/// Registration loss: triangulates every keypoint pair, aligns the virtual
/// keypoints to the triangulated set with Kabsch, and returns the mean
/// Euclidean error (1/N) sum |x_hat_i - T_o x_i| together with T_o.
/// Triangulation and Kabsch errors propagate.
RegistrationResult registration_loss(const KeypointSet2D& kps1,
                                     const KeypointSet2D& kps2,
                                     const KeypointSet3D& virtual_pts,
                                     const CameraIntrinsics& k1,
                                     const CameraIntrinsics& k2,
                                     const RigidTransform& c1_T_c2);

/// Consistency loss: mean per-keypoint epipolar penalty
/// (1/N) sum |[u2, v2, 1] F [u1, v1, 1]^T| (or its square).
double consistency_loss(const KeypointSet2D& kps1, const KeypointSet2D& kps2,
                        const FundamentalMatrix& f,
                        ConsistencyPenalty penalty = ConsistencyPenalty::kAbsolute);

/// Weighted total: lambda1 * registration + lambda2 * consistency.
double total_loss(const KeypointSet2D& kps1, const KeypointSet2D& kps2,
                  const KeypointSet3D& virtual_pts, const CameraIntrinsics& k1,
                  const CameraIntrinsics& k2, const RigidTransform& c1_T_c2,
                  const LossWeights& w,
                  ConsistencyPenalty penalty = ConsistencyPenalty::kAbsolute);

/// Central finite-difference gradient of the total loss over all 4N pixel
/// coordinates, ordered [u1_0, v1_0, ..., u1_{N-1}, v1_{N-1}, u2_0, v2_0,
/// ...].
Eigen::VectorXd loss_gradient(const KeypointSet2D& kps1,
                              const KeypointSet2D& kps2,
                              const KeypointSet3D& virtual_pts,
                              const CameraIntrinsics& k1,
                              const CameraIntrinsics& k2,
                              const RigidTransform& c1_T_c2,
                              const LossWeights& w, double fd_step,
                              ConsistencyPenalty penalty = ConsistencyPenalty::kAbsolute);

struct RefineResult {
  KeypointSet2D kps1;
  KeypointSet2D kps2;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  int iterations = 0;
};

/// Gradient descent on the total loss over the 2D keypoints of both views,
/// with a backtracking line search (step halved until the loss decreases, at
/// most 30 halvings per iteration). Stops when the gradient norm drops below
/// grad_tolerance, after max_iterations, or when no decreasing step exists.
/// The final loss never exceeds the initial loss. Throws NoDescent when the
/// line search fails at the first iterate and the start is not already
/// optimal (loss above 1e-7, the zero-at-truth scale).
RefineResult refine_keypoints(const KeypointSet2D& kps1,
                              const KeypointSet2D& kps2,
                              const KeypointSet3D& virtual_pts,
                              const CameraIntrinsics& k1,
                              const CameraIntrinsics& k2,
                              const RigidTransform& c1_T_c2,
                              const LossWeights& w, const RefineConfig& cfg,
                              ConsistencyPenalty penalty = ConsistencyPenalty::kAbsolute);

}  // namespace vkpose
