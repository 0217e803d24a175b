#include <doctest.h>

#include <algorithm>
#include <vkpose/keypoints.hpp>
#include <vkpose/pnp.hpp>

#include "test_util.hpp"

using namespace vkpose;
using namespace vkpose::test;

namespace {

struct PlantedPnp {
  Correspondences corr;
  RigidTransform pose;  // camera <- object
};

// Plants a pose whose object lands inside the frustum and projects the given
// object-frame points.
PlantedPnp plant_pnp(Rng& rng, const CameraIntrinsics& k,
                     const KeypointSet3D& object_points, double noise_px = 0.0) {
  PlantedPnp out;
  Point3 center = random_scene_point(rng, k, 2.5, 6.0);
  out.pose = {random_rotation(rng), Vec3::Zero()};
  out.pose.translation = center;  // object centroid near `center`
  out.corr.points3d = object_points;
  for (const auto& x : object_points) {
    Point2 px = project(k, out.pose, x);
    out.corr.points2d.push_back(
        px + noise_px * Point2(rng.normal(), rng.normal()));
  }
  return out;
}

KeypointSet3D cube() {
  return generate_virtual_keypoints(8, KeypointDistribution::regular(), 0);
}

KeypointSet3D tetrahedron() {
  return generate_virtual_keypoints(4, KeypointDistribution::regular(), 0);
}

}  // namespace

TEST_SUITE("pnp") {

TEST_CASE("dlt recovers a planted pose from noiseless cube vertices") {
  Rng rng(307);
  CameraIntrinsics k = vga_camera();
  for (int i = 0; i < 200; ++i) {
    PlantedPnp p = plant_pnp(rng, k, cube());
    RigidTransform est = pnp_dlt(p.corr, k);
    CHECK(rotation_gap(est, p.pose) <= 1e-6);
    CHECK(translation_gap(est, p.pose) <= 1e-6);
  }
}

TEST_CASE("dlt needs six points") {
  Rng rng(311);
  CameraIntrinsics k = vga_camera();
  KeypointSet3D all = cube();
  KeypointSet3D five(all.begin(), all.begin() + 5);
  PlantedPnp p = plant_pnp(rng, k, five);
  CHECK_THROWS_AS(pnp_dlt(p.corr, k), TooFewPoints);
}

TEST_CASE("dlt rejects coplanar points") {
  Rng rng(313);
  CameraIntrinsics k = vga_camera();
  KeypointSet3D square = {{-1, -1, 0}, {1, -1, 0}, {1, 1, 0}, {-1, 1, 0},
                          {0.5, -0.2, 0}, {-0.3, 0.7, 0}, {0.1, 0.1, 0},
                          {0.8, 0.9, 0}};
  PlantedPnp p = plant_pnp(rng, k, square);
  CHECK_THROWS_AS(pnp_dlt(p.corr, k), DegenerateConfiguration);
}

TEST_CASE("refinement leaves the ground truth unchanged") {
  Rng rng(317);
  CameraIntrinsics k = vga_camera();
  PlantedPnp p = plant_pnp(rng, k, cube());
  PnpRefineResult res = pnp_refine(p.corr, k, p.pose);
  CHECK(rotation_gap(res.pose, p.pose) <= 1e-10);
  CHECK(translation_gap(res.pose, p.pose) <= 1e-10);
  CHECK(res.rmse <= 1e-10);
}

TEST_CASE("refinement pulls a slightly rotated start back to the truth") {
  Rng rng(331);
  CameraIntrinsics k = vga_camera();
  for (int i = 0; i < 100; ++i) {
    PlantedPnp p = plant_pnp(rng, k, cube());
    RigidTransform init{
        so3_exp((2.0 * M_PI / 180.0) * rng.unit_vector()) * p.pose.rotation,
        p.pose.translation};
    PnpRefineResult res = pnp_refine(p.corr, k, init);
    CHECK(rotation_gap(res.pose, p.pose) <= 1e-8);
    CHECK(translation_gap(res.pose, p.pose) <= 1e-8);
  }
}

TEST_CASE("refinement never increases the reprojection error") {
  Rng rng(337);
  CameraIntrinsics k = vga_camera();
  for (int i = 0; i < 100; ++i) {
    PlantedPnp p = plant_pnp(rng, k, cube(), 1.0);
    RigidTransform dlt = pnp_dlt(p.corr, k);
    double dlt_rmse = reprojection_rmse(p.corr, k, dlt);
    PnpRefineResult res = pnp_refine(p.corr, k, dlt);
    CHECK(res.rmse <= dlt_rmse + 1e-15);
    CHECK(reprojection_rmse(p.corr, k, res.pose) ==
          doctest::Approx(res.rmse).epsilon(1e-12));
  }
}

TEST_CASE("solve_pnp recovers noiseless eight-point poses") {
  Rng rng(347);
  CameraIntrinsics k = vga_camera();
  for (int i = 0; i < 1000; ++i) {
    PlantedPnp p = plant_pnp(rng, k, cube());
    RigidTransform est = solve_pnp(p.corr, k, i);
    CHECK(rotation_gap(est, p.pose) <= 1e-8);
    CHECK(translation_gap(est, p.pose) <= 1e-8);
  }
}

TEST_CASE("solve_pnp handles the four-point restart path") {
  Rng rng(349);
  CameraIntrinsics k = vga_camera();
  for (int i = 0; i < 50; ++i) {
    PlantedPnp p = plant_pnp(rng, k, tetrahedron());
    RigidTransform est = solve_pnp(p.corr, k, i);
    CHECK(reprojection_rmse(p.corr, k, est) <= 1e-6);
  }
}

TEST_CASE("solve_pnp requires four correspondences") {
  CameraIntrinsics k = vga_camera();
  Correspondences c;
  c.points3d = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  c.points2d = {{0, 0}, {10, 0}, {0, 10}};
  CHECK_THROWS_AS(solve_pnp(c, k, 0), TooFewPoints);
}

TEST_CASE("solve_pnp reprojects onto the observations") {
  Rng rng(353);
  CameraIntrinsics k = vga_camera();
  for (int i = 0; i < 100; ++i) {
    KeypointSet3D pts;
    for (int j = 0; j < 7; ++j) pts.push_back(rng.in_ball(1.0));
    PlantedPnp p = plant_pnp(rng, k, pts);
    RigidTransform est = solve_pnp(p.corr, k, i);
    CHECK(reprojection_rmse(p.corr, k, est) <= 1e-6);
  }
}

TEST_CASE("pose error grows with pixel noise") {
  Rng rng(359);
  CameraIntrinsics k = vga_camera();
  auto median_rot_error = [&](double sigma) {
    std::vector<double> errors;
    Rng local(359);
    for (int i = 0; i < 200; ++i) {
      PlantedPnp p = plant_pnp(local, k, cube(), sigma);
      errors.push_back(rotation_gap(solve_pnp(p.corr, k, i), p.pose));
    }
    std::nth_element(errors.begin(), errors.begin() + errors.size() / 2,
                     errors.end());
    return errors[errors.size() / 2];
  };
  CHECK(median_rot_error(2.0) >= median_rot_error(0.5));
}

TEST_CASE("degenerate dlt input falls back to restarts") {
  // Coplanar points break the linear path; the restart path still solves the
  // pose by reprojection.
  Rng rng(367);
  CameraIntrinsics k = vga_camera();
  KeypointSet3D plane = {{-1, -1, 0}, {1, -1, 0}, {1, 1, 0}, {-1, 1, 0},
                         {0.4, -0.6, 0}, {-0.2, 0.3, 0}};
  PlantedPnp p = plant_pnp(rng, k, plane);
  RigidTransform est = solve_pnp(p.corr, k, 5);
  CHECK(reprojection_rmse(p.corr, k, est) <= 1e-6);
}

}  // TEST_SUITE
