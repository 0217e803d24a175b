#include "vkpose/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace vkpose {

namespace {

// Below this angle the trigonometric ratios switch to series expansions;
// above pi minus this the log axis comes from the symmetric part.
constexpr double kSmallAngle = 1e-4;

}  // namespace

Mat3 skew(const Vec3& v) {
  Mat3 m;
  // clang-format off
  m <<     0, -v.z(),  v.y(),
       v.z(),      0, -v.x(),
      -v.y(),  v.x(),      0;
  // clang-format on
  return m;
}

Rotation::Rotation(const Mat3& m) : m_(m) {
  double ortho = (m * m.transpose() - Mat3::Identity()).norm();
  if (ortho > 1e-9) {
    throw InvalidValue("rotation matrix is not orthonormal (|RR^T - I| = " +
                       std::to_string(ortho) + ")");
  }
  if (std::abs(m.determinant() - 1.0) > 1e-9) {
    throw InvalidValue("rotation matrix determinant is not +1");
  }
}

Rotation Rotation::from_quaternion(double w, double x, double y, double z) {
  double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (n < 1e-300) throw InvalidValue("zero quaternion");
  w /= n;
  x /= n;
  y /= n;
  z /= n;
  Mat3 m;
  // clang-format off
  m << 1 - 2 * (y * y + z * z),     2 * (x * y - w * z),     2 * (x * z + w * y),
           2 * (x * y + w * z), 1 - 2 * (x * x + z * z),     2 * (y * z - w * x),
           2 * (x * z - w * y),     2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  // clang-format on
  return Rotation(m, Unchecked{});
}

double Rotation::angle_to(const Rotation& other) const {
  return so3_log(inverse() * other).norm();
}

Rotation so3_exp(const Vec3& axis_angle) {
  double theta2 = axis_angle.squaredNorm();
  double theta = std::sqrt(theta2);
  Mat3 k = skew(axis_angle);
  double a, b;  // R = I + a*K + b*K^2 with K = skew(axis_angle)
  if (theta < kSmallAngle) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  return Rotation(Mat3::Identity() + a * k + b * (k * k),
                  Rotation::Unchecked{});
}

Vec3 so3_log(const Rotation& r) {
  const Mat3& m = r.matrix();
  Vec3 vee(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  double cos_theta = std::clamp((m.trace() - 1.0) / 2.0, -1.0, 1.0);
  double theta = std::acos(cos_theta);

  if (theta < kSmallAngle) {
    // theta / (2 sin theta) ~= 1/2 * (1 + theta^2/6)
    return 0.5 * (1.0 + theta * theta / 6.0) * vee;
  }
  if (M_PI - theta < kSmallAngle) {
    // The skew part vanishes as theta -> pi; recover the axis as the unit
    // eigenvector of the symmetric part for eigenvalue +1.
    Eigen::SelfAdjointEigenSolver<Mat3> eig(0.5 * (m + m.transpose()));
    Vec3 axis = eig.eigenvectors().col(2);
    axis.normalize();
    if (axis.dot(vee) < 0.0) axis = -axis;  // either sign is valid at pi
    double sin_theta = std::min(1.0, 0.5 * vee.norm());
    return (M_PI - std::asin(sin_theta)) * axis;
  }
  return (theta / (2.0 * std::sin(theta))) * vee;
}

RigidTransform RigidTransform::inverse() const {
  Rotation rt = rotation.inverse();
  return {rt, -(rt * translation)};
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

CameraIntrinsics::CameraIntrinsics(double fx, double fy, double cx, double cy)
    : fx(fx), fy(fy), cx(cx), cy(cy) {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw InvalidValue("focal lengths must be positive");
  }
}

Mat3 CameraIntrinsics::matrix() const {
  Mat3 k;
  // clang-format off
  k << fx,  0, cx,
        0, fy, cy,
        0,  0,  1;
  // clang-format on
  return k;
}

Point2 project(const CameraIntrinsics& k, const RigidTransform& cam_from_obj,
               const Point3& p) {
  Vec3 q = cam_from_obj * p;
  if (q.z() <= kDepthEpsilon) {
    throw BehindCamera("point at depth " + std::to_string(q.z()) +
                       " is behind the camera");
  }
  return {k.fx * q.x() / q.z() + k.cx, k.fy * q.y() / q.z() + k.cy};
}

Rotation random_rotation(Rng& rng) {
  return Rotation::from_quaternion(rng.normal(), rng.normal(), rng.normal(),
                                   rng.normal());
}

Rotation random_rotation(std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return random_rotation(rng);
}

RigidTransform random_rigid_transform(Rng& rng, double translation_radius) {
  Rotation r = random_rotation(rng);
  return {r, rng.in_ball(translation_radius)};
}

}  // namespace vkpose
