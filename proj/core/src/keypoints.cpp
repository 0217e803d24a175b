#include "vkpose/keypoints.hpp"

#include <cmath>

namespace vkpose {

namespace {

KeypointSet3D regular_polyhedron(int n) {
  const double s3 = 1.0 / std::sqrt(3.0);
  switch (n) {
    case 4:
      return {{s3, s3, s3}, {s3, -s3, -s3}, {-s3, s3, -s3}, {-s3, -s3, s3}};
    case 6:
      return {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1},
              {0, 0, -1}};
    case 8: {
      KeypointSet3D pts;
      for (double x : {s3, -s3})
        for (double y : {s3, -s3})
          for (double z : {s3, -s3}) pts.emplace_back(x, y, z);
      return pts;
    }
    case 12: {
      const double phi = 0.5 * (1.0 + std::sqrt(5.0));
      const double n1 = 1.0 / std::sqrt(1.0 + phi * phi);
      const double np = phi * n1;
      KeypointSet3D pts;
      for (double a : {n1, -n1}) {
        for (double b : {np, -np}) {
          pts.emplace_back(0.0, a, b);
          pts.emplace_back(a, b, 0.0);
          pts.emplace_back(b, 0.0, a);
        }
      }
      return pts;
    }
    default:
      throw UnsupportedCount("no regular polyhedron with " +
                             std::to_string(n) + " vertices (use 4/6/8/12)");
  }
}

}  // namespace

KeypointSet3D generate_virtual_keypoints(int n, const KeypointDistribution& d,
                                         std::uint64_t rng_seed) {
  if (d.kind == KeypointDistribution::Kind::kRegular) {
    return regular_polyhedron(n);
  }
  if (n < 3) throw TooFewPoints("random keypoint sets need n >= 3");
  if (!(d.param > 0.0)) throw InvalidValue("distribution parameter must be positive");
  Rng rng(rng_seed);
  KeypointSet3D pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (d.kind == KeypointDistribution::Kind::kRSphere) {
      pts.push_back(d.param * rng.unit_vector());
    } else {
      pts.emplace_back(rng.uniform(-d.param, d.param),
                       rng.uniform(-d.param, d.param),
                       rng.uniform(-d.param, d.param));
    }
  }
  return pts;
}

Heatmap::Heatmap(Eigen::MatrixXd v) : values(std::move(v)) {
  if (values.size() == 0) throw InvalidValue("empty heatmap");
  if ((values.array() < 0.0).any() || !values.allFinite()) {
    throw InvalidValue("heatmap entries must be finite and non-negative");
  }
}

Point2 soft_argmax(const Heatmap& h) {
  double sum = h.values.sum();
  if (!(sum > 0.0)) throw AllZero("heatmap has zero total mass");
  double u = 0.0, v = 0.0;
  for (Eigen::Index r = 0; r < h.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < h.values.cols(); ++c) {
      double p = h.values(r, c);
      u += static_cast<double>(c) * p;
      v += static_cast<double>(r) * p;
    }
  }
  return {u / sum, v / sum};
}

Heatmap gaussian_heatmap(const Point2& center, double sigma, int height,
                         int width) {
  if (!(sigma > 0.0)) throw InvalidValue("sigma must be positive");
  if (height < 1 || width < 1) throw InvalidValue("empty heatmap grid");
  Eigen::MatrixXd g(height, width);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      double du = static_cast<double>(c) - center.x();
      double dv = static_cast<double>(r) - center.y();
      g(r, c) = std::exp(-(du * du + dv * dv) * inv);
    }
  }
  return Heatmap(std::move(g));
}

}  // namespace vkpose
