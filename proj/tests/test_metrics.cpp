#include <doctest.h>

#include <cmath>
#include <vkpose/keypoints.hpp>
#include <vkpose/metrics.hpp>

#include "test_util.hpp"

using namespace vkpose;
using namespace vkpose::test;

namespace {

ModelPoints cube_model() {
  std::vector<Point3> pts;
  for (double x : {1.0, -1.0})
    for (double y : {1.0, -1.0})
      for (double z : {1.0, -1.0}) pts.emplace_back(x, y, z);
  return ModelPoints(pts);
}

ModelPoints square_model() {
  return ModelPoints({{1, 1, 0}, {-1, 1, 0}, {-1, -1, 0}, {1, -1, 0}});
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("add is zero for identical poses") {
  Rng rng(401);
  RigidTransform pose = random_pose(rng);
  CHECK(add_metric(cube_model(), pose, pose) == 0.0);
}

TEST_CASE("a pure translation offset gives add equal to its norm") {
  Rng rng(409);
  for (int i = 0; i < 100; ++i) {
    RigidTransform gt = random_pose(rng);
    Vec3 d = rng.in_ball(1.0);
    RigidTransform pred{gt.rotation, gt.translation + d};
    CHECK(std::abs(add_metric(cube_model(), pred, gt) - d.norm()) <= 1e-12);
  }
}

TEST_CASE("add matches an independent per-point loop") {
  Rng rng(419);
  ModelPoints m = cube_model();
  for (int i = 0; i < 100; ++i) {
    RigidTransform pred = random_pose(rng);
    RigidTransform gt = random_pose(rng);
    double sum = 0.0;
    for (const auto& x : m.points) {
      Vec3 a = pred.rotation.matrix() * x + pred.translation;
      Vec3 b = gt.rotation.matrix() * x + gt.translation;
      sum += std::sqrt((a - b).dot(a - b));
    }
    CHECK(add_metric(m, pred, gt) ==
          doctest::Approx(sum / m.points.size()).epsilon(1e-12));
  }
}

TEST_CASE("add-s never exceeds add") {
  Rng rng(421);
  ModelPoints m = cube_model();
  for (int i = 0; i < 1000; ++i) {
    RigidTransform pred = random_pose(rng);
    RigidTransform gt = random_pose(rng);
    CHECK(adds_metric(m, pred, gt) <= add_metric(m, pred, gt) + 1e-15);
  }
}

TEST_CASE("a quarter turn of a square is invisible to add-s") {
  RigidTransform gt = RigidTransform::identity();
  RigidTransform pred{so3_exp({0.0, 0.0, M_PI / 2.0}), Vec3::Zero()};
  ModelPoints m = square_model();
  CHECK(adds_metric(m, pred, gt) <= 1e-12);
  CHECK(add_metric(m, pred, gt) > 1.0);
}

TEST_CASE("model diameter of the unit cube") {
  CHECK(std::abs(model_diameter(cube_model()) - 2.0 * std::sqrt(3.0)) <=
        1e-12);
  CHECK(model_diameter(ModelPoints({{1, 2, 3}, {1, 2, 3}})) == 0.0);
}

TEST_CASE("model diameter matches the brute-force double loop") {
  Rng rng(431);
  std::vector<Point3> pts;
  for (int i = 0; i < 40; ++i) pts.push_back(rng.in_ball(2.0));
  ModelPoints m(pts);
  double best = 0.0;
  for (const auto& a : pts) {
    for (const auto& b : pts) best = std::max(best, (a - b).norm());
  }
  CHECK(model_diameter(m) == best);
}

TEST_CASE("projection metric is zero for identical poses and matches a loop") {
  Rng rng(433);
  CameraIntrinsics k = vga_camera();
  RigidTransform gt{random_rotation(rng), Vec3(0.0, 0.0, 5.0)};
  CHECK(projection_metric(cube_model(), k, gt, gt) == 0.0);

  RigidTransform pred{gt.rotation, gt.translation + Vec3(0.0, 0.0, 0.8)};
  double sum = 0.0;
  for (const auto& x : cube_model().points) {
    sum += (project(k, pred, x) - project(k, gt, x)).norm();
  }
  CHECK(projection_metric(cube_model(), k, pred, gt) ==
        doctest::Approx(sum / 8.0).epsilon(1e-12));
}

TEST_CASE("projection metric propagates BehindCamera") {
  CameraIntrinsics k = vga_camera();
  RigidTransform behind{Rotation(), Vec3(0.0, 0.0, -5.0)};
  CHECK_THROWS_AS(
      projection_metric(cube_model(), k, behind, RigidTransform::identity()),
      BehindCamera);
}

TEST_CASE("pose errors of identical poses vanish") {
  Rng rng(439);
  RigidTransform pose = random_pose(rng);
  PoseErrors e = pose_errors(pose, pose);
  CHECK(e.rot_deg <= 1e-12);  // R^T R deviates from I only by round-off
  CHECK(e.trans == 0.0);
}

TEST_CASE("a five-degree rotation reads as five degrees") {
  Rng rng(443);
  for (int i = 0; i < 50; ++i) {
    RigidTransform pred{so3_exp((5.0 * M_PI / 180.0) * rng.unit_vector()),
                        Vec3::Zero()};
    PoseErrors e = pose_errors(pred, RigidTransform::identity());
    CHECK(std::abs(e.rot_deg - 5.0) <= 1e-9);
    CHECK(e.trans == 0.0);
  }
}

TEST_CASE("rotation error stays within [0, 180] degrees") {
  Rng rng(449);
  for (int i = 0; i < 500; ++i) {
    PoseErrors e = pose_errors(random_pose(rng), random_pose(rng));
    CHECK(e.rot_deg >= 0.0);
    CHECK(e.rot_deg <= 180.0 + 1e-9);
  }
}

TEST_CASE("add is invariant to a consistent model-frame change") {
  Rng rng(457);
  ModelPoints m = cube_model();
  for (int i = 0; i < 100; ++i) {
    RigidTransform pred = random_pose(rng);
    RigidTransform gt = random_pose(rng);
    RigidTransform g = random_pose(rng);
    std::vector<Point3> remapped;
    for (const auto& x : m.points) remapped.push_back(g.inverse() * x);
    double base = add_metric(m, pred, gt);
    double changed =
        add_metric(ModelPoints(remapped), compose(pred, g), compose(gt, g));
    CHECK(std::abs(base - changed) <= 1e-9);
  }
}

TEST_CASE("judge applies all four criteria") {
  CameraIntrinsics k = vga_camera();
  MetricThresholds th;
  ModelPoints m = cube_model();
  RigidTransform gt{Rotation(), Vec3(0.0, 0.0, 5.0)};

  TrialVerdict exact = judge(m, k, gt, gt, th, false);
  CHECK(exact.pass_add);
  CHECK(exact.pass_adds);
  CHECK(exact.pass_proj);
  CHECK(exact.pass_degcm);

  // Offset by 20% of the diameter: the ADD criterion must fail.
  double diam = model_diameter(m);
  RigidTransform off{gt.rotation, gt.translation + Vec3(0.2 * diam, 0, 0)};
  TrialVerdict offset = judge(m, k, off, gt, th, false);
  CHECK_FALSE(offset.pass_add);
  CHECK(offset.add == doctest::Approx(0.2 * diam).epsilon(1e-12));
}

TEST_CASE("judge on a symmetric square under a quarter turn") {
  CameraIntrinsics k = vga_camera();
  MetricThresholds th;
  ModelPoints m = square_model();
  RigidTransform gt{Rotation(), Vec3(0.0, 0.0, 5.0)};
  RigidTransform pred{so3_exp({0.0, 0.0, M_PI / 2.0}), gt.translation};

  TrialVerdict symmetric = judge(m, k, pred, gt, th, true);
  CHECK(symmetric.pass_add);        // ADD-S based for symmetric objects
  CHECK(symmetric.pass_adds);
  CHECK_FALSE(symmetric.pass_degcm);  // 90 degrees is far over 5

  TrialVerdict plain = judge(m, k, pred, gt, th, false);
  CHECK_FALSE(plain.pass_add);
}

TEST_CASE("metric thresholds default to the standard criteria") {
  MetricThresholds th;
  CHECK(th.add_fraction == 0.10);
  CHECK(th.proj_pixels == 5.0);
  CHECK(th.rot_deg == 5.0);
  CHECK(th.trans_cm == 0.05);
  th.add_fraction = -1.0;
  CHECK_THROWS_AS(th.validate(), InvalidValue);
}

TEST_CASE("models need at least two finite points") {
  CHECK_THROWS_AS(ModelPoints({{0, 0, 0}}), InvalidValue);
}

}  // TEST_SUITE
