#include "vkpose/losses.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "vkpose/alignment.hpp"

namespace vkpose {

namespace {

// A start whose loss is already at the zero-at-truth scale cannot be
// required to descend further; see refine_keypoints.
constexpr double kAlreadyOptimalLoss = 1e-7;
constexpr int kMaxHalvings = 30;
// Floor for the IRLS weights 1 / max(|r_i|, floor).
constexpr double kIrlsFloor = 1e-9;

void check_sets(const KeypointSet2D& kps1, const KeypointSet2D& kps2,
                const KeypointSet3D& virtual_pts) {
  if (kps1.size() != kps2.size() || kps1.size() != virtual_pts.size()) {
    throw std::invalid_argument(
        "losses: keypoint sets must be index-aligned with the virtual set");
  }
  if (kps1.empty()) throw EmptyInput("losses: empty keypoint sets");
}

// Caches the per-pair projection matrices and fundamental matrix so that
// repeated loss evaluations (finite differences, line search) do not rebuild
// them.
class TotalLossEvaluator {
 public:
  TotalLossEvaluator(const KeypointSet3D& virtual_pts,
                     const CameraIntrinsics& k1, const CameraIntrinsics& k2,
                     const RigidTransform& c1_T_c2, const LossWeights& w,
                     ConsistencyPenalty penalty)
      : virtual_pts_(virtual_pts),
        projections_(projection_pair(k1, k2, c1_T_c2)),
        f_(fundamental_matrix(k1, k2, c1_T_c2)),
        w_(w),
        penalty_(penalty) {
    w.validate();
  }

  double registration(const KeypointSet2D& kps1, const KeypointSet2D& kps2,
                      RigidTransform* aligned = nullptr) const {
    KeypointSet3D tri;
    tri.reserve(kps1.size());
    for (std::size_t i = 0; i < kps1.size(); ++i) {
      tri.push_back(
          triangulate(kps1[i], kps2[i], projections_.first, projections_.second));
    }
    RigidTransform t_o = kabsch(virtual_pts_, tri);
    double sum = 0.0;
    for (std::size_t i = 0; i < kps1.size(); ++i) {
      sum += (tri[i] - t_o * virtual_pts_[i]).norm();
    }
    if (aligned) *aligned = t_o;
    return sum / static_cast<double>(kps1.size());
  }

  double operator()(const KeypointSet2D& kps1,
                    const KeypointSet2D& kps2) const {
    return w_.lambda1 * registration(kps1, kps2) +
           w_.lambda2 * consistency_loss(kps1, kps2, f_, penalty_);
  }

  /// Raw residual stack [r_1; ...; r_N; e_1; ...; e_N] (3N alignment
  /// components plus N epipolar values); the loss is a weighted sum of the
  /// block norms / absolute values.
  Eigen::VectorXd residuals(const KeypointSet2D& kps1,
                            const KeypointSet2D& kps2) const {
    const std::size_t n = kps1.size();
    KeypointSet3D tri;
    tri.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      tri.push_back(
          triangulate(kps1[i], kps2[i], projections_.first, projections_.second));
    }
    RigidTransform t_o = kabsch(virtual_pts_, tri);
    Eigen::VectorXd r(4 * n);
    for (std::size_t i = 0; i < n; ++i) {
      r.segment<3>(3 * i) = tri[i] - t_o * virtual_pts_[i];
      r(3 * n + i) = epipolar_residual(kps1[i], kps2[i], f_);
    }
    return r;
  }

  const LossWeights& weights() const { return w_; }
  ConsistencyPenalty penalty() const { return penalty_; }

 private:
  const KeypointSet3D& virtual_pts_;
  std::pair<ProjectionMatrix, ProjectionMatrix> projections_;
  FundamentalMatrix f_;
  LossWeights w_;
  ConsistencyPenalty penalty_;
};

struct GnDirections {
  Eigen::VectorXd anchored;  // proximal variant; empty when unavailable
  Eigen::VectorXd plain;
};

// IRLS Gauss-Newton directions for the same objective: linearizes the raw
// residual stack by central differences and solves the reweighted normal
// equations (J^T W J + (mu + nu) I) d = -J^T W rho - nu (x - x0), where the
// weights 1 / max(block norm, floor) realize the norm / absolute-value
// penalties. The proximal term nu pins down the 6-dof gauge of the objective
// (any rigid re-placement of the detections leaves the loss unchanged): it
// steers the step toward the manifold point nearest the starting detections.
// It fades quadratically as the loss decreases, so convergence ends in plain
// Gauss-Newton. The plain variant (nu = 0) is kept as a fallback for hard
// configurations. Directions are empty when they cannot be computed.
GnDirections gauss_newton_directions(const TotalLossEvaluator& eval,
                                     KeypointSet2D& kps1, KeypointSet2D& kps2,
                                     double fd_step,
                                     const Eigen::VectorXd& anchor_shift,
                                     double current_loss,
                                     double initial_loss) {
  const std::size_t n = kps1.size();
  const auto dim = static_cast<Eigen::Index>(4 * n);
  Eigen::VectorXd rho;
  try {
    rho = eval.residuals(kps1, kps2);
  } catch (const Error&) {
    return {};
  }

  Eigen::MatrixXd jac(dim, dim);
  auto column = [&](double& coord, Eigen::Index col) -> bool {
    const double saved = coord;
    try {
      coord = saved + fd_step;
      Eigen::VectorXd plus = eval.residuals(kps1, kps2);
      coord = saved - fd_step;
      Eigen::VectorXd minus = eval.residuals(kps1, kps2);
      coord = saved;
      jac.col(col) = (plus - minus) / (2.0 * fd_step);
      return true;
    } catch (const Error&) {
      coord = saved;
      return false;
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (!column(kps1[i].x(), 2 * i)) return {};
    if (!column(kps1[i].y(), 2 * i + 1)) return {};
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!column(kps2[i].x(), 2 * n + 2 * i)) return {};
    if (!column(kps2[i].y(), 2 * n + 2 * i + 1)) return {};
  }

  const LossWeights& w = eval.weights();
  const double nd = static_cast<double>(n);
  Eigen::VectorXd wt(dim);
  for (std::size_t i = 0; i < n; ++i) {
    double block = std::max(rho.segment<3>(3 * i).norm(), kIrlsFloor);
    wt.segment<3>(3 * i).setConstant(w.lambda1 / (nd * block));
  }
  for (std::size_t i = 0; i < n; ++i) {
    double denom = eval.penalty() == ConsistencyPenalty::kAbsolute
                       ? std::max(std::abs(rho(3 * n + i)), kIrlsFloor)
                       : 1.0;
    wt(3 * n + i) = w.lambda2 / (nd * denom);
  }

  Eigen::MatrixXd jtw = jac.transpose() * wt.asDiagonal();
  Eigen::MatrixXd h = jtw * jac;
  const double mu = 1e-10 * (1.0 + h.diagonal().maxCoeff());
  Eigen::VectorXd jtw_rho = jtw * rho;

  GnDirections out;
  Eigen::MatrixXd hp = h;
  hp.diagonal().array() += mu;
  Eigen::VectorXd plain = hp.ldlt().solve(-jtw_rho);
  if (plain.allFinite()) out.plain = std::move(plain);

  // Anchor strength fades quadratically with progress: dominant while the
  // iterate is far from the manifold, negligible in the endgame.
  const double nu = 0.1 * current_loss *
                    (initial_loss > 0.0 ? current_loss / initial_loss : 0.0);
  h.diagonal().array() += mu + nu;
  Eigen::VectorXd anchored = h.ldlt().solve(-jtw_rho - nu * anchor_shift);
  if (anchored.allFinite()) out.anchored = std::move(anchored);
  return out;
}

Eigen::VectorXd gradient_of(const TotalLossEvaluator& eval,
                            KeypointSet2D& kps1, KeypointSet2D& kps2,
                            double fd_step) {
  const std::size_t n = kps1.size();
  Eigen::VectorXd g(4 * n);
  auto central = [&](double& coord, std::size_t out) {
    const double saved = coord;
    coord = saved + fd_step;
    double plus = eval(kps1, kps2);
    coord = saved - fd_step;
    double minus = eval(kps1, kps2);
    coord = saved;
    g(out) = (plus - minus) / (2.0 * fd_step);
  };
  for (std::size_t i = 0; i < n; ++i) {
    central(kps1[i].x(), 2 * i);
    central(kps1[i].y(), 2 * i + 1);
  }
  for (std::size_t i = 0; i < n; ++i) {
    central(kps2[i].x(), 2 * n + 2 * i);
    central(kps2[i].y(), 2 * n + 2 * i + 1);
  }
  return g;
}

}  // namespace

void LossWeights::validate() const {
  if (lambda1 < 0.0 || lambda2 < 0.0) {
    throw InvalidValue("loss weights must be non-negative");
  }
}

void RefineConfig::validate() const {
  if (!(step_size > 0.0)) throw InvalidValue("refine_step_size must be > 0");
  if (max_iterations < 0) throw InvalidValue("refine_max_iters must be >= 0");
  if (!(grad_tolerance > 0.0)) throw InvalidValue("refine_grad_tol must be > 0");
  if (!(fd_step > 0.0)) throw InvalidValue("refine_fd_step must be > 0");
}

RegistrationResult registration_loss(const KeypointSet2D& kps1,
                                     const KeypointSet2D& kps2,
                                     const KeypointSet3D& virtual_pts,
                                     const CameraIntrinsics& k1,
                                     const CameraIntrinsics& k2,
                                     const RigidTransform& c1_T_c2) {
  check_sets(kps1, kps2, virtual_pts);
  auto [p1, p2] = projection_pair(k1, k2, c1_T_c2);
  KeypointSet3D tri;
  tri.reserve(kps1.size());
  for (std::size_t i = 0; i < kps1.size(); ++i) {
    tri.push_back(triangulate(kps1[i], kps2[i], p1, p2));
  }
  RigidTransform t_o = kabsch(virtual_pts, tri);
  double sum = 0.0;
  for (std::size_t i = 0; i < kps1.size(); ++i) {
    sum += (tri[i] - t_o * virtual_pts[i]).norm();
  }
  return {sum / static_cast<double>(kps1.size()), t_o};
}

double consistency_loss(const KeypointSet2D& kps1, const KeypointSet2D& kps2,
                        const FundamentalMatrix& f,
                        ConsistencyPenalty penalty) {
  if (kps1.size() != kps2.size()) {
    throw std::invalid_argument("consistency_loss: mismatched keypoint sets");
  }
  if (kps1.empty()) throw EmptyInput("consistency_loss: empty keypoint sets");
  double sum = 0.0;
  for (std::size_t i = 0; i < kps1.size(); ++i) {
    double r = epipolar_residual(kps1[i], kps2[i], f);
    sum += penalty == ConsistencyPenalty::kAbsolute ? std::abs(r) : r * r;
  }
  return sum / static_cast<double>(kps1.size());
}

double total_loss(const KeypointSet2D& kps1, const KeypointSet2D& kps2,
                  const KeypointSet3D& virtual_pts, const CameraIntrinsics& k1,
                  const CameraIntrinsics& k2, const RigidTransform& c1_T_c2,
                  const LossWeights& w, ConsistencyPenalty penalty) {
  check_sets(kps1, kps2, virtual_pts);
  TotalLossEvaluator eval(virtual_pts, k1, k2, c1_T_c2, w, penalty);
  return eval(kps1, kps2);
}

Eigen::VectorXd loss_gradient(const KeypointSet2D& kps1,
                              const KeypointSet2D& kps2,
                              const KeypointSet3D& virtual_pts,
                              const CameraIntrinsics& k1,
                              const CameraIntrinsics& k2,
                              const RigidTransform& c1_T_c2,
                              const LossWeights& w, double fd_step,
                              ConsistencyPenalty penalty) {
  check_sets(kps1, kps2, virtual_pts);
  if (!(fd_step > 0.0)) throw InvalidValue("fd_step must be > 0");
  TotalLossEvaluator eval(virtual_pts, k1, k2, c1_T_c2, w, penalty);
  KeypointSet2D a = kps1, b = kps2;
  return gradient_of(eval, a, b, fd_step);
}

RefineResult refine_keypoints(const KeypointSet2D& kps1,
                              const KeypointSet2D& kps2,
                              const KeypointSet3D& virtual_pts,
                              const CameraIntrinsics& k1,
                              const CameraIntrinsics& k2,
                              const RigidTransform& c1_T_c2,
                              const LossWeights& w, const RefineConfig& cfg,
                              ConsistencyPenalty penalty) {
  check_sets(kps1, kps2, virtual_pts);
  cfg.validate();
  TotalLossEvaluator eval(virtual_pts, k1, k2, c1_T_c2, w, penalty);

  RefineResult out{kps1, kps2, eval(kps1, kps2), 0.0, 0};
  double loss = out.initial_loss;
  const std::size_t n = kps1.size();

  // Backtracking line search along `dir` scaled by `initial_step`; applies
  // the best step found and returns success.
  auto line_search = [&](const Eigen::VectorXd& dir, double initial_step) {
    double step = initial_step;
    for (int h = 0; h <= kMaxHalvings; ++h, step *= 0.5) {
      KeypointSet2D c1 = out.kps1, c2 = out.kps2;
      for (std::size_t i = 0; i < n; ++i) {
        c1[i].x() += step * dir(2 * i);
        c1[i].y() += step * dir(2 * i + 1);
        c2[i].x() += step * dir(2 * n + 2 * i);
        c2[i].y() += step * dir(2 * n + 2 * i + 1);
      }
      double cand;
      try {
        cand = eval(c1, c2);
      } catch (const Error&) {
        continue;  // step landed on a degenerate configuration
      }
      if (cand < loss) {
        out.kps1 = std::move(c1);
        out.kps2 = std::move(c2);
        loss = cand;
        return true;
      }
    }
    return false;
  };

  auto flatten_shift = [&]() {
    Eigen::VectorXd shift(4 * n);
    for (std::size_t i = 0; i < n; ++i) {
      shift(2 * i) = out.kps1[i].x() - kps1[i].x();
      shift(2 * i + 1) = out.kps1[i].y() - kps1[i].y();
      shift(2 * n + 2 * i) = out.kps2[i].x() - kps2[i].x();
      shift(2 * n + 2 * i + 1) = out.kps2[i].y() - kps2[i].y();
    }
    return shift;
  };

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    Eigen::VectorXd g = gradient_of(eval, out.kps1, out.kps2, cfg.fd_step);
    if (g.norm() <= cfg.grad_tolerance) break;

    // Anchored Gauss-Newton first (full step is the natural scale), the
    // plain variant next, plain gradient descent as the last resort.
    GnDirections gn = gauss_newton_directions(eval, out.kps1, out.kps2,
                                              cfg.fd_step, flatten_shift(),
                                              loss, out.initial_loss);
    bool accepted = gn.anchored.size() > 0 && gn.anchored.dot(g) < 0 &&
                    line_search(gn.anchored, 1.0);
    if (!accepted) {
      accepted = gn.plain.size() > 0 && gn.plain.dot(g) < 0 &&
                 line_search(gn.plain, 1.0);
    }
    if (!accepted) accepted = line_search(-g, cfg.step_size);

    if (!accepted) {
      if (iter == 0 && loss > kAlreadyOptimalLoss) {
        throw NoDescent("refine_keypoints: no decreasing step at the start");
      }
      break;
    }
    out.iterations = iter + 1;
  }
  out.final_loss = loss;
  return out;
}

}  // namespace vkpose
