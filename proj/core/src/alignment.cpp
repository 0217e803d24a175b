#include "vkpose/alignment.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "vkpose/pnp.hpp"
#include "vkpose/rng.hpp"
#include "vkpose/twoview.hpp"

namespace vkpose {

void AveragingParams::validate() const {
  if (!(rot_threshold > 0.0)) throw InvalidValue("rot_threshold must be > 0");
  if (!(trans_threshold > 0.0))
    throw InvalidValue("trans_threshold must be > 0");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw InvalidValue("confidence must be in (0, 1)");
  if (max_iterations < 1) throw InvalidValue("max_iterations must be >= 1");
  if (!(mean_tolerance > 0.0))
    throw InvalidValue("mean_tolerance must be > 0");
  if (max_mean_steps < 1) throw InvalidValue("max_mean_steps must be >= 1");
}

RigidTransform kabsch(const KeypointSet3D& src, const KeypointSet3D& dst) {
  if (src.size() != dst.size()) {
    throw std::invalid_argument("kabsch: point sets must be index-aligned");
  }
  const std::size_t n = src.size();
  if (n < 3) throw TooFewPoints("kabsch needs at least 3 correspondences");

  Vec3 src_c = Vec3::Zero(), dst_c = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    src_c += src[i];
    dst_c += dst[i];
  }
  src_c /= static_cast<double>(n);
  dst_c /= static_cast<double>(n);

  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    h += (src[i] - src_c) * (dst[i] - dst_c).transpose();
  }

  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues()(1) < 1e-12) {
    throw DegenerateConfiguration("kabsch: correspondences are collinear");
  }
  Mat3 u = svd.matrixU();
  Mat3 v = svd.matrixV();
  Vec3 d(1.0, 1.0, (v * u.transpose()).determinant() < 0 ? -1.0 : 1.0);
  Rotation r(v * d.asDiagonal() * u.transpose());
  return {r, dst_c - r * src_c};
}

RigidTransform offset_transform(const RigidTransform& c1_T_o,
                                const RigidTransform& p_T_c1) {
  return compose(c1_T_o.inverse(), p_T_c1.inverse());
}

RigidTransform query_pose(const RigidTransform& p_T_c2,
                          const RigidTransform& t_a) {
  return compose(p_T_c2.inverse(), t_a.inverse());
}

AveragedTransform average_offset(const std::vector<RigidTransform>& transforms,
                                 const AveragingParams& params,
                                 std::uint64_t rng_seed) {
  params.validate();
  if (transforms.empty()) {
    throw EmptyInput("average_offset: no transforms to average");
  }
  const int n = static_cast<int>(transforms.size());
  Rng rng(rng_seed);

  std::vector<int> inlier_set;
  double ratio = 0.0;
  int winning = 0;
  int iterations = 0;
  for (int iter = 1; iter <= params.max_iterations; ++iter) {
    iterations = iter;
    int k = static_cast<int>(rng.uniform_index(n));
    std::vector<int> candidates;
    for (int i = 0; i < n; ++i) {
      double dr = transforms[k].rotation.angle_to(transforms[i].rotation);
      double dt = (transforms[k].translation - transforms[i].translation).norm();
      if (dr < params.rot_threshold && dt < params.trans_threshold) {
        candidates.push_back(i);
      }
    }
    if (inlier_set.size() < candidates.size()) {
      inlier_set = std::move(candidates);
      ratio = static_cast<double>(inlier_set.size()) / n;
      winning = k;
    }
    if (1.0 - std::pow(1.0 - ratio, iter) > params.confidence) break;
  }

  // Geodesic L2-mean of the inlier rotations, seeded from the winning
  // hypothesis.
  Rotation mean_rot = transforms[winning].rotation;
  int steps = 0;
  for (int step = 1; step <= params.max_mean_steps; ++step) {
    Vec3 r = Vec3::Zero();
    for (int j : inlier_set) {
      r += so3_log(mean_rot.inverse() * transforms[j].rotation);
    }
    r /= static_cast<double>(inlier_set.size());
    if (r.norm() < params.mean_tolerance) break;
    mean_rot = mean_rot * so3_exp(r);
    steps = step;
  }

  Vec3 mean_t = Vec3::Zero();
  for (int j : inlier_set) mean_t += transforms[j].translation;
  mean_t /= static_cast<double>(inlier_set.size());

  return {{mean_rot, mean_t}, std::move(inlier_set), iterations, steps};
}

RigidTransform reference_pose_from_correspondences(
    const KeypointSet2D& kps1, const KeypointSet2D& kps2,
    const CameraIntrinsics& k1, const CameraIntrinsics& k2,
    const RigidTransform& c1_T_c2, const RigidTransform& frame) {
  if (kps1.size() != kps2.size()) {
    throw std::invalid_argument(
        "reference_pose_from_correspondences: mismatched correspondence sets");
  }
  if (kps1.size() < 4) {
    throw TooFewCorrespondences(
        "reference pose needs >= 4 correspondences for a unique PnP solution");
  }
  auto [p1, p2] = projection_pair(k1, k2, c1_T_c2);
  Correspondences c;
  c.points2d = kps1;
  c.points3d.reserve(kps1.size());
  for (std::size_t i = 0; i < kps1.size(); ++i) {
    c.points3d.push_back(frame * triangulate(kps1[i], kps2[i], p1, p2));
  }
  return solve_pnp(c, k1, /*rng_seed=*/0);
}

}  // namespace vkpose
