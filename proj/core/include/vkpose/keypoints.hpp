#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "vkpose/geometry.hpp"

namespace vkpose {

/// How the 3D virtual keypoints are laid out.
struct KeypointDistribution {
  enum class Kind { kRegular, kRSphere, kRVolume };

  Kind kind = Kind::kRegular;
  /// Sphere radius for kRSphere, cube half-extent for kRVolume; ignored for
  /// kRegular (regular polyhedra have circumradius 1).
  double param = 1.0;

  static KeypointDistribution regular() { return {Kind::kRegular, 1.0}; }
  static KeypointDistribution r_sphere(double radius) {
    return {Kind::kRSphere, radius};
  }
  static KeypointDistribution r_volume(double half_extent) {
    return {Kind::kRVolume, half_extent};
  }
};

/// Generates the virtual keypoint set.
///  - kRegular: vertices of the regular polyhedron with circumradius 1
///    (4 tetrahedron, 6 octahedron, 8 cube, 12 icosahedron); deterministic,
///    the seed is ignored. Other counts throw UnsupportedCount.
///  - kRSphere: n i.i.d. uniform points on the sphere of the given radius.
///  - kRVolume: n i.i.d. uniform points in the cube [-e, e]^3.
KeypointSet3D generate_virtual_keypoints(int n, const KeypointDistribution& d,
                                         std::uint64_t rng_seed);

/// Non-negative detection-probability grid. values(h, w) is row h (vertical,
/// v) and column w (horizontal, u).
struct Heatmap {
  Eigen::MatrixXd values;

  Heatmap() = default;
  explicit Heatmap(Eigen::MatrixXd v);

  Eigen::Index height() const { return values.rows(); }
  Eigen::Index width() const { return values.cols(); }
};

/// Probability-weighted centroid of the normalized grid, as (u, v) =
/// (sum w*p, sum h*p). Throws AllZero when the grid sums to <= 0.
Point2 soft_argmax(const Heatmap& h);

/// Unnormalized isotropic Gaussian sampled at integer pixel centers.
Heatmap gaussian_heatmap(const Point2& center, double sigma, int height,
                         int width);

}  // namespace vkpose
