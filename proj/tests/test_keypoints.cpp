#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vkpose/keypoints.hpp>

using namespace vkpose;

namespace {

bool contains_point(const KeypointSet3D& pts, const Point3& q, double tol) {
  return std::any_of(pts.begin(), pts.end(),
                     [&](const Point3& p) { return (p - q).norm() <= tol; });
}

}  // namespace

TEST_SUITE("keypoints") {

TEST_CASE("the 8-point regular set is the unit-circumradius cube") {
  KeypointSet3D pts =
      generate_virtual_keypoints(8, KeypointDistribution::regular(), 123);
  REQUIRE(pts.size() == 8);
  const double s = 1.0 / std::sqrt(3.0);
  for (double x : {s, -s}) {
    for (double y : {s, -s}) {
      for (double z : {s, -s}) {
        CHECK(contains_point(pts, {x, y, z}, 1e-15));
      }
    }
  }
}

TEST_CASE("regular sets have unit circumradius and zero centroid") {
  for (int n : {4, 6, 8, 12}) {
    KeypointSet3D pts =
        generate_virtual_keypoints(n, KeypointDistribution::regular(), 0);
    REQUIRE(pts.size() == static_cast<std::size_t>(n));
    Point3 centroid = Point3::Zero();
    for (const auto& p : pts) {
      CHECK(std::abs(p.norm() - 1.0) <= 1e-12);
      centroid += p;
    }
    CHECK((centroid / n).norm() <= 1e-12);
    // all vertices distinct
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        CHECK((pts[i] - pts[j]).norm() > 0.5);
      }
    }
  }
}

TEST_CASE("regular counts other than 4/6/8/12 are unsupported") {
  CHECK_THROWS_AS(
      generate_virtual_keypoints(5, KeypointDistribution::regular(), 0),
      UnsupportedCount);
  CHECK_THROWS_AS(
      generate_virtual_keypoints(10, KeypointDistribution::regular(), 0),
      UnsupportedCount);
}

TEST_CASE("the regular generator ignores the seed") {
  KeypointSet3D a =
      generate_virtual_keypoints(12, KeypointDistribution::regular(), 1);
  KeypointSet3D b =
      generate_virtual_keypoints(12, KeypointDistribution::regular(), 999);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("r-sphere points lie on the sphere and are seed-reproducible") {
  KeypointSet3D a =
      generate_virtual_keypoints(8, KeypointDistribution::r_sphere(1.0), 7);
  KeypointSet3D b =
      generate_virtual_keypoints(8, KeypointDistribution::r_sphere(1.0), 7);
  KeypointSet3D c =
      generate_virtual_keypoints(8, KeypointDistribution::r_sphere(1.0), 8);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i].norm() - 1.0) <= 1e-12);
    CHECK(a[i] == b[i]);
  }
  bool any_differ = false;
  for (std::size_t i = 0; i < a.size(); ++i) any_differ |= a[i] != c[i];
  CHECK(any_differ);

  KeypointSet3D scaled =
      generate_virtual_keypoints(6, KeypointDistribution::r_sphere(2.5), 7);
  for (const auto& p : scaled) CHECK(std::abs(p.norm() - 2.5) <= 1e-12);
}

TEST_CASE("r-volume points stay inside the cube") {
  KeypointSet3D pts =
      generate_virtual_keypoints(64, KeypointDistribution::r_volume(0.7), 21);
  for (const auto& p : pts) {
    CHECK(p.cwiseAbs().maxCoeff() <= 0.7);
  }
}

TEST_CASE("random distributions need at least three points") {
  CHECK_THROWS_AS(
      generate_virtual_keypoints(2, KeypointDistribution::r_sphere(1.0), 0),
      TooFewPoints);
}

TEST_CASE("soft-argmax of a point mass") {
  Eigen::MatrixXd grid = Eigen::MatrixXd::Zero(8, 8);
  grid(3, 5) = 2.0;  // row 3 (v), column 5 (u)
  Point2 p = soft_argmax(Heatmap(grid));
  CHECK(p.x() == 5.0);
  CHECK(p.y() == 3.0);
}

TEST_CASE("soft-argmax of a uniform grid is the centroid") {
  Point2 p = soft_argmax(Heatmap(Eigen::MatrixXd::Ones(4, 4)));
  CHECK(p.x() == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(p.y() == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("soft-argmax of a discretized gaussian recovers its center") {
  Point2 center(10.3, 7.8);
  Heatmap h = gaussian_heatmap(center, 2.0, 32, 32);
  Point2 p = soft_argmax(h);

  // Brute-force weighted sum, written out independently.
  double su = 0.0, sv = 0.0, mass = 0.0;
  for (int r = 0; r < 32; ++r) {
    for (int c = 0; c < 32; ++c) {
      double w = std::exp(-((c - center.x()) * (c - center.x()) +
                            (r - center.y()) * (r - center.y())) /
                          8.0);
      su += c * w;
      sv += r * w;
      mass += w;
    }
  }
  CHECK(p.x() == doctest::Approx(su / mass).epsilon(1e-12));
  CHECK(p.y() == doctest::Approx(sv / mass).epsilon(1e-12));
  CHECK(std::abs(p.x() - center.x()) <= 0.05);
  CHECK(std::abs(p.y() - center.y()) <= 0.05);
}

TEST_CASE("an all-zero heatmap cannot be decoded") {
  CHECK_THROWS_AS(soft_argmax(Heatmap(Eigen::MatrixXd::Zero(4, 4))), AllZero);
}

TEST_CASE("negative heatmap entries are rejected") {
  Eigen::MatrixXd grid = Eigen::MatrixXd::Ones(4, 4);
  grid(1, 2) = -0.5;
  CHECK_THROWS_AS(Heatmap{grid}, InvalidValue);
}

TEST_CASE("soft-argmax stays inside the grid") {
  Rng rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd grid(6, 9);
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 9; ++c) grid(r, c) = rng.uniform01();
    }
    Point2 p = soft_argmax(Heatmap(grid));
    CHECK(p.x() >= 0.0);
    CHECK(p.x() <= 8.0);
    CHECK(p.y() >= 0.0);
    CHECK(p.y() <= 5.0);
  }
}

TEST_CASE("gaussian heatmap peaks at the nearest pixel") {
  Heatmap h = gaussian_heatmap({10.3, 7.8}, 2.0, 32, 32);
  Eigen::Index max_r, max_c;
  h.values.maxCoeff(&max_r, &max_c);
  CHECK(max_c == 10);
  CHECK(max_r == 8);
}

TEST_CASE("gaussian round trip is accurate away from the borders") {
  Rng rng(73);
  for (int trial = 0; trial < 50; ++trial) {
    Point2 center(rng.uniform(8.0, 55.0), rng.uniform(8.0, 55.0));
    Point2 decoded = soft_argmax(gaussian_heatmap(center, 2.0, 64, 64));
    CHECK((decoded - center).cwiseAbs().maxCoeff() <= 0.05);
  }
}

TEST_CASE("a near-delta gaussian on a pixel decodes exactly") {
  Point2 decoded = soft_argmax(gaussian_heatmap({12.0, 9.0}, 0.3, 32, 32));
  CHECK(std::abs(decoded.x() - 12.0) <= 1e-6);
  CHECK(std::abs(decoded.y() - 9.0) <= 1e-6);
}

}  // TEST_SUITE
