#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "vkpose/errors.hpp"
#include "vkpose/rng.hpp"

namespace vkpose {

using Point2 = Eigen::Vector2d;
using Point3 = Eigen::Vector3d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

/// Ordered, index-aligned keypoint sets; the index defines correspondence.
using KeypointSet2D = std::vector<Point2>;
using KeypointSet3D = std::vector<Point3>;

Mat3 skew(const Vec3& v);

/// Element of SO(3), stored as a 3x3 matrix. The checked constructor rejects
/// matrices that are not orthonormal with determinant +1 within 1e-9.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}
  explicit Rotation(const Mat3& m);

  /// Builds from a (not necessarily normalized) quaternion.
  static Rotation from_quaternion(double w, double x, double y, double z);

  const Mat3& matrix() const { return m_; }
  Rotation inverse() const { return Rotation(m_.transpose(), Unchecked{}); }

  Vec3 operator*(const Vec3& p) const { return m_ * p; }
  Rotation operator*(const Rotation& rhs) const {
    return Rotation(m_ * rhs.m_, Unchecked{});
  }

  /// Geodesic distance to another rotation, radians in [0, pi].
  double angle_to(const Rotation& other) const;

 private:
  struct Unchecked {};
  Rotation(const Mat3& m, Unchecked) : m_(m) {}

  friend Rotation so3_exp(const Vec3&);

  Mat3 m_;
};

/// Rodrigues exponential map; the zero vector yields the identity.
Rotation so3_exp(const Vec3& axis_angle);

/// Logarithm map; returns an axis-angle vector with norm in [0, pi].
/// Stable near theta = 0 (series) and theta = pi (symmetric-part eigenvector).
Vec3 so3_log(const Rotation& r);

/// Element of SE(3): p -> rotation * p + translation.
struct RigidTransform {
  Rotation rotation;
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }
  RigidTransform inverse() const;
};

RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

inline RigidTransform operator*(const RigidTransform& a,
                                const RigidTransform& b) {
  return compose(a, b);
}

/// Pinhole calibration with zero skew. K = [[fx,0,cx],[0,fy,cy],[0,0,1]].
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  CameraIntrinsics() = default;
  CameraIntrinsics(double fx, double fy, double cx, double cy);

  Mat3 matrix() const;
};

/// Depth at or below this raises BehindCamera.
inline constexpr double kDepthEpsilon = 1e-9;

/// Projects an object-frame point through the pose and intrinsics.
/// Throws BehindCamera when the camera-frame depth is <= kDepthEpsilon.
Point2 project(const CameraIntrinsics& k, const RigidTransform& cam_from_obj,
               const Point3& p);

/// Uniform rotation (Haar measure) via a random quaternion on S^3.
Rotation random_rotation(Rng& rng);
Rotation random_rotation(std::uint64_t rng_seed);

/// Uniform rigid transform: Haar rotation, translation uniform in a ball.
RigidTransform random_rigid_transform(Rng& rng, double translation_radius);

}  // namespace vkpose
