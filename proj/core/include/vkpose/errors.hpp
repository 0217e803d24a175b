#pragma once

#include <stdexcept>
#include <string>

namespace vkpose {

/// Base class for every recoverable error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A value violates a type invariant at construction (bad rotation matrix,
/// non-positive focal length, rank-deficient fundamental matrix, ...).
struct InvalidValue : Error {
  using Error::Error;
};

/// Point at or behind the camera plane (depth <= 1e-9).
struct BehindCamera : Error {
  using Error::Error;
};

/// Triangulation rays are parallel or coincident; no unique finite point.
struct DegenerateRays : Error {
  using Error::Error;
};

/// Relative camera translation is (numerically) zero; no epipolar geometry.
struct ZeroBaseline : Error {
  using Error::Error;
};

/// Fewer correspondences than the solver's minimum.
struct TooFewPoints : Error {
  using Error::Error;
};

/// Fewer than 4 two-view correspondences for the reference-pose procedure.
struct TooFewCorrespondences : Error {
  using Error::Error;
};

/// Point configuration is collinear/coplanar where full rank is required.
struct DegenerateConfiguration : Error {
  using Error::Error;
};

/// Empty input list where at least one element is required.
struct EmptyInput : Error {
  using Error::Error;
};

/// No regular polyhedron with the requested vertex count.
struct UnsupportedCount : Error {
  using Error::Error;
};

/// Heatmap with non-positive total mass.
struct AllZero : Error {
  using Error::Error;
};

/// Line search could not decrease the loss at the first iterate.
struct NoDescent : Error {
  using Error::Error;
};

/// Every PnP restart failed to produce an evaluable pose.
struct NoSolution : Error {
  using Error::Error;
};

/// Scene sampling failed to place all keypoints in front of both cameras.
struct SamplingExhausted : Error {
  using Error::Error;
};

}  // namespace vkpose
