#include "vkpose/metrics.hpp"

#include <cmath>

namespace vkpose {

ModelPoints::ModelPoints(std::vector<Point3> pts) : points(std::move(pts)) {
  if (points.size() < 2) {
    throw InvalidValue("model needs at least 2 points");
  }
  for (const auto& p : points) {
    if (!p.allFinite()) throw InvalidValue("model points must be finite");
  }
}

void MetricThresholds::validate() const {
  if (!(add_fraction > 0.0)) throw InvalidValue("add_fraction must be > 0");
  if (!(proj_pixels > 0.0)) throw InvalidValue("proj_pixels must be > 0");
  if (!(rot_deg > 0.0)) throw InvalidValue("rot_deg must be > 0");
  if (!(trans_cm > 0.0)) throw InvalidValue("trans_cm must be > 0");
}

double add_metric(const ModelPoints& m, const RigidTransform& pred,
                  const RigidTransform& gt) {
  double sum = 0.0;
  for (const auto& x : m.points) sum += (pred * x - gt * x).norm();
  return sum / static_cast<double>(m.points.size());
}

double adds_metric(const ModelPoints& m, const RigidTransform& pred,
                   const RigidTransform& gt) {
  std::vector<Point3> gt_pts;
  gt_pts.reserve(m.points.size());
  for (const auto& x : m.points) gt_pts.push_back(gt * x);
  double sum = 0.0;
  for (const auto& x1 : m.points) {
    Point3 p = pred * x1;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : gt_pts) best = std::min(best, (p - g).norm());
    sum += best;
  }
  return sum / static_cast<double>(m.points.size());
}

double model_diameter(const ModelPoints& m) {
  double d = 0.0;
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    for (std::size_t j = i + 1; j < m.points.size(); ++j) {
      d = std::max(d, (m.points[i] - m.points[j]).norm());
    }
  }
  return d;
}

double projection_metric(const ModelPoints& m, const CameraIntrinsics& k,
                         const RigidTransform& pred,
                         const RigidTransform& gt) {
  double sum = 0.0;
  for (const auto& x : m.points) {
    sum += (project(k, pred, x) - project(k, gt, x)).norm();
  }
  return sum / static_cast<double>(m.points.size());
}

PoseErrors pose_errors(const RigidTransform& pred, const RigidTransform& gt) {
  double rad = pred.rotation.angle_to(gt.rotation);
  return {rad * 180.0 / M_PI, (pred.translation - gt.translation).norm()};
}

TrialVerdict judge(const ModelPoints& m, const CameraIntrinsics& k,
                   const RigidTransform& pred, const RigidTransform& gt,
                   const MetricThresholds& th, bool symmetric) {
  th.validate();
  TrialVerdict v;
  v.add = add_metric(m, pred, gt);
  v.adds = adds_metric(m, pred, gt);
  v.proj_px = projection_metric(m, k, pred, gt);
  PoseErrors pe = pose_errors(pred, gt);
  v.rot_deg = pe.rot_deg;
  v.trans = pe.trans;

  double add_limit = th.add_fraction * model_diameter(m);
  v.pass_add = (symmetric ? v.adds : v.add) < add_limit;
  v.pass_adds = v.adds < add_limit;
  v.pass_proj = v.proj_px < th.proj_pixels;
  v.pass_degcm = v.rot_deg < th.rot_deg && v.trans < th.trans_cm;
  return v;
}

}  // namespace vkpose
