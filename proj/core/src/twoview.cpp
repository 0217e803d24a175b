#include "vkpose/twoview.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace vkpose {

ProjectionMatrix::ProjectionMatrix(const CameraIntrinsics& k,
                                   const RigidTransform& cam_from_world) {
  Mat34 rt;
  rt.leftCols<3>() = cam_from_world.rotation.matrix();
  rt.col(3) = cam_from_world.translation;
  p_ = k.matrix() * rt;
}

FundamentalMatrix::FundamentalMatrix(const Mat3& f) : f_(f) {
  Eigen::JacobiSVD<Mat3> svd(f);
  const auto& s = svd.singularValues();
  if (s(2) > 1e-9 * s(0)) {
    throw InvalidValue("fundamental matrix must have rank 2");
  }
}

std::pair<ProjectionMatrix, ProjectionMatrix> projection_pair(
    const CameraIntrinsics& k1, const CameraIntrinsics& k2,
    const RigidTransform& c1_T_c2) {
  return {ProjectionMatrix(k1, RigidTransform::identity()),
          ProjectionMatrix(k2, c1_T_c2.inverse())};
}

Mat4 build_dlt_matrix(const Point2& kp1, const Point2& kp2,
                      const ProjectionMatrix& p1, const ProjectionMatrix& p2) {
  Mat4 a;
  a.row(0) = kp1.x() * p1.row(2) - p1.row(0);
  a.row(1) = kp1.y() * p1.row(2) - p1.row(1);
  a.row(2) = kp2.x() * p2.row(2) - p2.row(0);
  a.row(3) = kp2.y() * p2.row(2) - p2.row(1);
  return a;
}

Point3 triangulate(const Point2& kp1, const Point2& kp2,
                   const ProjectionMatrix& p1, const ProjectionMatrix& p2) {
  Mat4 a = build_dlt_matrix(kp1, kp2, p1, p2);
  Eigen::JacobiSVD<Mat4> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s(2) <= 1e-12 * s(0)) {
    throw DegenerateRays("triangulation system has no unique solution "
                         "(coincident camera centers)");
  }
  Vec4 x = svd.matrixV().col(3);
  if (std::abs(x(3)) < 1e-12) {
    throw DegenerateRays("triangulated point at infinity (parallel rays)");
  }
  if (x(3) < 0) x = -x;
  return x.head<3>() / x(3);
}

FundamentalMatrix fundamental_matrix(const CameraIntrinsics& k1,
                                     const CameraIntrinsics& k2,
                                     const RigidTransform& c1_T_c2) {
  RigidTransform c2_from_c1 = c1_T_c2.inverse();
  if (c2_from_c1.translation.norm() < 1e-12) {
    throw ZeroBaseline("relative camera translation is zero");
  }
  Mat3 f = k2.matrix().transpose().inverse() * skew(c2_from_c1.translation) *
           c2_from_c1.rotation.matrix() * k1.matrix().inverse();
  return FundamentalMatrix(f);
}

double epipolar_residual(const Point2& kp1, const Point2& kp2,
                         const FundamentalMatrix& f) {
  Vec3 x1(kp1.x(), kp1.y(), 1.0);
  Vec3 x2(kp2.x(), kp2.y(), 1.0);
  return x2.dot(f.matrix() * x1);
}

}  // namespace vkpose
