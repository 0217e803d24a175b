#pragma once

#include <utility>

#include "vkpose/geometry.hpp"

namespace vkpose {

/// 3x4 pinhole projection matrix K [R | t]. Constructible only from valid
/// intrinsics and a rigid transform, so the left 3x3 block is K*R by
/// construction.
class ProjectionMatrix {
 public:
  ProjectionMatrix(const CameraIntrinsics& k,
                   const RigidTransform& cam_from_world);

  const Mat34& matrix() const { return p_; }

  /// k-th row (0-based) as a homogeneous 4-vector.
  Vec4 row(int k) const { return p_.row(k); }

 private:
  Mat34 p_;
};

/// Rank-2 epipolar matrix; x2^T F x1 = 0 for true correspondences.
class FundamentalMatrix {
 public:
  explicit FundamentalMatrix(const Mat3& f);

  const Mat3& matrix() const { return f_; }

 private:
  Mat3 f_;
};

/// Projection matrices of an image pair related by c1_T_c2, both mapping
/// points expressed in camera-1 coordinates:
///   P1 = K1 [I | 0],   P2 = K2 [R | t]  with  (R, t) = inverse(c1_T_c2).
std::pair<ProjectionMatrix, ProjectionMatrix> projection_pair(
    const CameraIntrinsics& k1, const CameraIntrinsics& k2,
    const RigidTransform& c1_T_c2);

/// The 4x4 linear triangulation system; A * x = 0 exactly when the
/// homogeneous point x projects to both pixels. Rows are
///   u1*p3_1 - p1_1,  v1*p3_1 - p2_1,  u2*p3_2 - p1_2,  v2*p3_2 - p2_2.
Mat4 build_dlt_matrix(const Point2& kp1, const Point2& kp2,
                      const ProjectionMatrix& p1, const ProjectionMatrix& p2);

/// Minimizer of |A x| over unit homogeneous x (last right singular vector,
/// sign-fixed so the fourth coordinate is positive), dehomogenized into
/// camera-1 coordinates. Throws DegenerateRays for parallel or coincident
/// rays (point at infinity, or a non-unique null space).
Point3 triangulate(const Point2& kp1, const Point2& kp2,
                   const ProjectionMatrix& p1, const ProjectionMatrix& p2);

/// F = K2^-T [t]x R K1^-1 with (R, t) = inverse(c1_T_c2).
/// Throws ZeroBaseline when |t| < 1e-12.
FundamentalMatrix fundamental_matrix(const CameraIntrinsics& k1,
                                     const CameraIntrinsics& k2,
                                     const RigidTransform& c1_T_c2);

/// Signed bilinear form [u2, v2, 1] F [u1, v1, 1]^T.
double epipolar_residual(const Point2& kp1, const Point2& kp2,
                         const FundamentalMatrix& f);

}  // namespace vkpose
