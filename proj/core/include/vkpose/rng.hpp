#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace vkpose {

/// Derives an independent stream seed from (base, index). Used for per-trial
/// and per-restart streams so parallel execution cannot change results.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index);

/// Deterministic splitmix64 generator with the floating-point helpers the
/// library needs. Distribution code is written out here instead of using
/// <random> so that sequences are identical for a given seed on every
/// platform, independent of the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform in [0, 1).
  double uniform01();

  /// Uniform in [a, b).
  double uniform(double a, double b);

  /// Uniform in {0, ..., n-1}; n must be positive.
  std::size_t uniform_index(std::size_t n);

  /// Standard normal via Box-Muller (two uniforms per call).
  double normal();

  /// Isotropic unit vector.
  Eigen::Vector3d unit_vector();

  /// Uniform inside the solid ball of the given radius.
  Eigen::Vector3d in_ball(double radius);

 private:
  std::uint64_t state_;
};

}  // namespace vkpose
