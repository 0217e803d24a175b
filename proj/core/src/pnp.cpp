#include "vkpose/pnp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vkpose/rng.hpp"

namespace vkpose {

namespace {

constexpr int kMaxGaussNewtonIterations = 50;
constexpr double kStepTolerance = 1e-12;
constexpr int kRestartCount = 32;
constexpr double kRestartDepthMin = 0.5;
constexpr double kRestartDepthMax = 20.0;

// Centered singular values of the 3D point cloud; the smallest must be
// meaningfully nonzero for the 12-parameter DLT to be well posed.
void require_spanning_3d(const KeypointSet3D& pts) {
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  Eigen::MatrixXd m(3, pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) m.col(i) = pts[i] - c;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s(2) <= 1e-12 || s(2) <= 1e-9 * s(0)) {
    throw DegenerateConfiguration(
        "pnp_dlt: 3D points are coplanar or collinear");
  }
}

}  // namespace

void Correspondences::validate() const {
  if (points3d.size() != points2d.size()) {
    throw std::invalid_argument(
        "correspondences: 2D and 3D sets must be index-aligned");
  }
}

double reprojection_rmse(const Correspondences& c, const CameraIntrinsics& k,
                         const RigidTransform& pose) {
  c.validate();
  if (c.size() == 0) throw EmptyInput("reprojection_rmse: no correspondences");
  double sq = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    sq += (project(k, pose, c.points3d[i]) - c.points2d[i]).squaredNorm();
  }
  return std::sqrt(sq / static_cast<double>(c.size()));
}

RigidTransform pnp_dlt(const Correspondences& c, const CameraIntrinsics& k) {
  c.validate();
  const std::size_t n = c.size();
  if (n < 6) throw TooFewPoints("pnp_dlt needs at least 6 correspondences");
  require_spanning_3d(c.points3d);

  // Solve for M = [R | t] in normalized camera coordinates.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 12);
  for (std::size_t i = 0; i < n; ++i) {
    Vec4 xh = c.points3d[i].homogeneous();
    double xn = (c.points2d[i].x() - k.cx) / k.fx;
    double yn = (c.points2d[i].y() - k.cy) / k.fy;
    a.block<1, 4>(2 * i, 0) = xh.transpose();
    a.block<1, 4>(2 * i, 8) = -xn * xh.transpose();
    a.block<1, 4>(2 * i + 1, 4) = xh.transpose();
    a.block<1, 4>(2 * i + 1, 8) = -yn * xh.transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  Eigen::Matrix<double, 12, 1> v = svd.matrixV().col(11);

  Mat34 m;
  m.row(0) = v.segment<4>(0);
  m.row(1) = v.segment<4>(4);
  m.row(2) = v.segment<4>(8);

  double scale = m.block<1, 3>(2, 0).norm();
  if (scale < 1e-12) {
    throw DegenerateConfiguration("pnp_dlt: singular projection estimate");
  }
  m /= scale;

  double depth_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    depth_sum += m.row(2).dot(c.points3d[i].homogeneous());
  }
  if (depth_sum < 0) m = -m;

  Mat3 b = m.leftCols<3>();
  Eigen::JacobiSVD<Mat3> bsvd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = bsvd.matrixU();
  Mat3 vv = bsvd.matrixV();
  Vec3 d(1.0, 1.0, (u * vv.transpose()).determinant() < 0 ? -1.0 : 1.0);
  Rotation r(u * d.asDiagonal() * vv.transpose());
  return {r, m.col(3)};
}

PnpRefineResult pnp_refine(const Correspondences& c, const CameraIntrinsics& k,
                           const RigidTransform& init) {
  c.validate();
  if (c.size() < 3) {
    throw TooFewPoints("pnp_refine needs at least 3 correspondences");
  }
  RigidTransform pose = init;
  double rmse = reprojection_rmse(c, k, pose);  // BehindCamera on a bad init

  PnpRefineResult result{pose, rmse, 0, false};
  for (int iter = 1; iter <= kMaxGaussNewtonIterations; ++iter) {
    result.iterations = iter;

    Eigen::Matrix<double, 6, 6> jtj = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> jtr = Eigen::Matrix<double, 6, 1>::Zero();
    for (std::size_t i = 0; i < c.size(); ++i) {
      Vec3 q = pose * c.points3d[i];
      double iz = 1.0 / q.z();
      Point2 proj(k.fx * q.x() * iz + k.cx, k.fy * q.y() * iz + k.cy);
      Point2 res = proj - c.points2d[i];

      Eigen::Matrix<double, 2, 3> dpix;
      dpix << k.fx * iz, 0, -k.fx * q.x() * iz * iz,
              0, k.fy * iz, -k.fy * q.y() * iz * iz;
      // q(w, dt) = exp(w) * (R p) + t + dt
      Eigen::Matrix<double, 3, 6> dq;
      dq.leftCols<3>() = -skew(q - pose.translation);
      dq.rightCols<3>() = Mat3::Identity();
      Eigen::Matrix<double, 2, 6> j = dpix * dq;
      jtj += j.transpose() * j;
      jtr += j.transpose() * res;
    }

    Eigen::Matrix<double, 6, 1> delta = jtj.ldlt().solve(-jtr);
    if (!delta.allFinite()) break;
    if (delta.norm() < kStepTolerance) {
      result.converged = true;
      break;
    }

    // Halve the step until the error decreases; reject steps that put a
    // point behind the camera.
    double step = 1.0;
    bool accepted = false;
    bool evaluable = false;
    for (int h = 0; h < 20; ++h, step *= 0.5) {
      RigidTransform cand{so3_exp(step * delta.head<3>()) * pose.rotation,
                          pose.translation + step * delta.tail<3>()};
      double cand_rmse;
      try {
        cand_rmse = reprojection_rmse(c, k, cand);
      } catch (const BehindCamera&) {
        continue;
      }
      evaluable = true;
      if (cand_rmse < rmse) {
        pose = cand;
        rmse = cand_rmse;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No evaluable step at all: aborted, flagged not converged.
      result.converged = evaluable;
      break;
    }
    if (rmse < result.rmse) {
      result.pose = pose;
      result.rmse = rmse;
    }
  }
  return result;
}

RigidTransform solve_pnp(const Correspondences& c, const CameraIntrinsics& k,
                         std::uint64_t rng_seed) {
  c.validate();
  const std::size_t n = c.size();
  if (n < 4) {
    throw TooFewPoints(
        "solve_pnp needs at least 4 correspondences for a unique solution");
  }

  if (n >= 6) {
    try {
      return pnp_refine(c, k, pnp_dlt(c, k)).pose;
    } catch (const DegenerateConfiguration&) {
      // fall through to random restarts
    } catch (const BehindCamera&) {
      // DLT produced an unrefinable estimate; fall through
    }
  }

  Vec3 centroid3 = Vec3::Zero();
  Point2 centroid2 = Point2::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    centroid3 += c.points3d[i];
    centroid2 += c.points2d[i];
  }
  centroid3 /= static_cast<double>(n);
  centroid2 /= static_cast<double>(n);
  Vec3 ray((centroid2.x() - k.cx) / k.fx, (centroid2.y() - k.cy) / k.fy, 1.0);
  ray.normalize();

  RigidTransform best;
  double best_rmse = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int r = 0; r < kRestartCount; ++r) {
    Rng rng(mix_seed(rng_seed, r));
    Rotation rot = random_rotation(rng);
    double depth = std::exp(
        rng.uniform(std::log(kRestartDepthMin), std::log(kRestartDepthMax)));
    RigidTransform init{rot, depth * ray - rot * centroid3};
    PnpRefineResult res;
    try {
      res = pnp_refine(c, k, init);
    } catch (const BehindCamera&) {
      continue;  // initialization not evaluable
    }
    if (res.rmse < best_rmse) {
      best = res.pose;
      best_rmse = res.rmse;
      found = true;
    }
  }
  if (!found) throw NoSolution("solve_pnp: every restart failed");
  return best;
}

}  // namespace vkpose
