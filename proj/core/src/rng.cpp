#include "vkpose/rng.hpp"

#include <cmath>

namespace vkpose {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t finalize(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  return finalize(finalize(base + (index + 1) * kGolden));
}

std::uint64_t Rng::next_u64() {
  state_ += kGolden;
  return finalize(state_);
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform01(); }

std::size_t Rng::uniform_index(std::size_t n) {
  auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
  return i < n ? i : n - 1;
}

double Rng::normal() {
  // 1 - u1 is in (0, 1], keeping the log argument away from zero.
  double u1 = 1.0 - uniform01();
  double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Eigen::Vector3d Rng::unit_vector() {
  for (;;) {
    Eigen::Vector3d v(normal(), normal(), normal());
    double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

Eigen::Vector3d Rng::in_ball(double radius) {
  double r = radius * std::cbrt(uniform01());
  return r * unit_vector();
}

}  // namespace vkpose
