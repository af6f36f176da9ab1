#include "regforge/pose.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <json.hpp>

namespace regforge {
namespace {

// Rigid alignment world -> camera from paired point sets (Horn / Kabsch).
RigidTransform absolute_orientation(const std::vector<Vec3>& world,
                                    const std::vector<Vec3>& cam) {
  const std::size_t n = world.size();
  Vec3 cw = Vec3::Zero(), cc = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    cw += world[i];
    cc += cam[i];
  }
  cw /= static_cast<double>(n);
  cc /= static_cast<double>(n);
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < n; ++i) h += (cam[i] - cc) * (world[i] - cw).transpose();
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  RigidTransform t;
  t.rotation = svd.matrixU() * d * svd.matrixV().transpose();
  t.translation = cc - t.rotation * cw;
  return t;
}

struct EpnpProblem {
  std::vector<Vec3> world;
  std::vector<Eigen::Vector2d> pixels;
  Mat3 k;
  int num_ctrl = 4;
  std::vector<Vec3> ctrl_world;
  Eigen::MatrixXd alphas;  // n x num_ctrl
};

double reproj_rms(const EpnpProblem& prob, const RigidTransform& t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < prob.world.size(); ++i) {
    Correspondence3d2d c{prob.world[i], prob.pixels[i].x(), prob.pixels[i].y()};
    const double e = reprojection_error(t, prob.k, c);
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(prob.world.size()));
}

void choose_control_points(EpnpProblem* prob) {
  const std::size_t n = prob->world.size();
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : prob->world) centroid += p;
  centroid /= static_cast<double>(n);
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : prob->world) cov += (p - centroid) * (p - centroid).transpose();
  cov /= static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);  // ascending eigenvalues
  const Vec3 evals = eig.eigenvalues().cwiseMax(0.0);
  const double spread = evals(2);
  if (spread < 1e-12)
    throw Error(ErrorCode::degenerate, "epnp: world points are coincident");
  const bool planar = evals(0) < 1e-8 * spread;
  const bool collinear = evals(1) < 1e-8 * spread;
  if (collinear) throw Error(ErrorCode::degenerate, "epnp: world points are collinear");

  prob->num_ctrl = planar ? 3 : 4;
  prob->ctrl_world.clear();
  prob->ctrl_world.push_back(centroid);
  for (int k = 0; k < prob->num_ctrl - 1; ++k) {
    const int axis = 2 - k;  // largest spread first
    prob->ctrl_world.push_back(centroid +
                               std::sqrt(evals(axis)) * eig.eigenvectors().col(axis));
  }

  // barycentric coordinates (affine, sum to 1)
  Eigen::MatrixXd basis(3, prob->num_ctrl - 1);
  for (int k = 1; k < prob->num_ctrl; ++k)
    basis.col(k - 1) = prob->ctrl_world[k] - prob->ctrl_world[0];
  const Eigen::MatrixXd pinv =
      (basis.transpose() * basis).ldlt().solve(basis.transpose());
  prob->alphas.resize(n, prob->num_ctrl);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd w = pinv * (prob->world[i] - prob->ctrl_world[0]);
    prob->alphas(i, 0) = 1.0 - w.sum();
    for (int k = 1; k < prob->num_ctrl; ++k) prob->alphas(i, k) = w(k - 1);
  }
}

Eigen::MatrixXd build_m(const EpnpProblem& prob) {
  const std::size_t n = prob.world.size();
  const double fx = prob.k(0, 0), fy = prob.k(1, 1);
  const double cx = prob.k(0, 2), cy = prob.k(1, 2);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 3 * prob.num_ctrl);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < prob.num_ctrl; ++j) {
      const double a = prob.alphas(i, j);
      m(2 * i, 3 * j + 0) = a * fx;
      m(2 * i, 3 * j + 2) = a * (cx - prob.pixels[i].x());
      m(2 * i + 1, 3 * j + 1) = a * fy;
      m(2 * i + 1, 3 * j + 2) = a * (cy - prob.pixels[i].y());
    }
  }
  return m;
}

std::vector<Vec3> ctrl_from_vector(const Eigen::VectorXd& x, int num_ctrl) {
  std::vector<Vec3> ctrl(num_ctrl);
  for (int j = 0; j < num_ctrl; ++j) ctrl[j] = x.segment<3>(3 * j);
  return ctrl;
}

// squared distances between control points, row per unordered pair
std::vector<std::pair<int, int>> ctrl_pairs(int num_ctrl) {
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < num_ctrl; ++a)
    for (int b = a + 1; b < num_ctrl; ++b) pairs.emplace_back(a, b);
  return pairs;
}

// Least-squares beta estimate for the linearized distance constraints, for the
// case of `nb` null-space vectors.
Eigen::VectorXd solve_betas(const Eigen::MatrixXd& null_vecs, int nb,
                            const std::vector<Vec3>& ctrl_world, int num_ctrl) {
  const auto pairs = ctrl_pairs(num_ctrl);
  // unknowns: beta_a*beta_b for a<=b
  std::vector<std::pair<int, int>> unknowns;
  for (int a = 0; a < nb; ++a)
    for (int b = a; b < nb; ++b) unknowns.emplace_back(a, b);
  Eigen::MatrixXd l(pairs.size(), unknowns.size());
  Eigen::VectorXd rho(pairs.size());
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const auto [ci, cj] = pairs[r];
    rho(r) = (ctrl_world[ci] - ctrl_world[cj]).squaredNorm();
    for (std::size_t u = 0; u < unknowns.size(); ++u) {
      const auto [a, b] = unknowns[u];
      const Vec3 da = null_vecs.col(a).segment<3>(3 * ci) - null_vecs.col(a).segment<3>(3 * cj);
      const Vec3 db = null_vecs.col(b).segment<3>(3 * ci) - null_vecs.col(b).segment<3>(3 * cj);
      l(r, u) = (a == b ? 1.0 : 2.0) * da.dot(db);
    }
  }
  const Eigen::VectorXd prod =
      l.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rho);

  Eigen::VectorXd betas = Eigen::VectorXd::Zero(nb);
  const double b00 = prod(0);
  betas(0) = std::sqrt(std::abs(b00));
  for (int b = 1; b < nb; ++b) {
    // beta_0*beta_b entry
    int idx = b;  // unknowns are ordered (0,0), (0,1), ..., (0,nb-1), (1,1), ...
    betas(b) = betas(0) > 1e-12 ? prod(idx) / betas(0) : 0.0;
  }
  if (b00 < 0) betas = -betas;  // keep consistency; sign fixed later by cheirality
  return betas;
}

void gauss_newton_betas(const Eigen::MatrixXd& null_vecs, int nb,
                        const std::vector<Vec3>& ctrl_world, int num_ctrl,
                        Eigen::VectorXd* betas) {
  const auto pairs = ctrl_pairs(num_ctrl);
  for (int iter = 0; iter < 10; ++iter) {
    Eigen::MatrixXd jac(pairs.size(), nb);
    Eigen::VectorXd res(pairs.size());
    for (std::size_t r = 0; r < pairs.size(); ++r) {
      const auto [ci, cj] = pairs[r];
      Vec3 d = Vec3::Zero();
      for (int a = 0; a < nb; ++a)
        d += (*betas)(a) * (null_vecs.col(a).segment<3>(3 * ci) -
                            null_vecs.col(a).segment<3>(3 * cj));
      res(r) = d.squaredNorm() - (ctrl_world[ci] - ctrl_world[cj]).squaredNorm();
      for (int a = 0; a < nb; ++a) {
        const Vec3 da = null_vecs.col(a).segment<3>(3 * ci) -
                        null_vecs.col(a).segment<3>(3 * cj);
        jac(r, a) = 2.0 * d.dot(da);
      }
    }
    // Damped normal equations: with nb = 4 the six distance constraints leave
    // J^T J rank-deficient, and plain LDLT would amplify the null directions.
    Eigen::MatrixXd jtj = jac.transpose() * jac;
    jtj.diagonal().array() += 1e-10 * (1.0 + jtj.trace());
    const Eigen::VectorXd step = jtj.ldlt().solve(-jac.transpose() * res);
    *betas += step;
    if (step.norm() < 1e-10) break;
  }
}

RigidTransform pose_from_betas(const EpnpProblem& prob, const Eigen::MatrixXd& null_vecs,
                               const Eigen::VectorXd& betas) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(3 * prob.num_ctrl);
  for (int a = 0; a < betas.size(); ++a) x += betas(a) * null_vecs.col(a);
  std::vector<Vec3> ctrl_cam = ctrl_from_vector(x, prob.num_ctrl);

  // cheirality: flip the solution if points end up behind the camera
  double mean_z = 0.0;
  for (std::size_t i = 0; i < prob.world.size(); ++i) {
    Vec3 p = Vec3::Zero();
    for (int j = 0; j < prob.num_ctrl; ++j) p += prob.alphas(i, j) * ctrl_cam[j];
    mean_z += p.z();
  }
  if (mean_z < 0.0)
    for (Vec3& c : ctrl_cam) c = -c;

  std::vector<Vec3> cam(prob.world.size());
  for (std::size_t i = 0; i < prob.world.size(); ++i) {
    cam[i] = Vec3::Zero();
    for (int j = 0; j < prob.num_ctrl; ++j) cam[i] += prob.alphas(i, j) * ctrl_cam[j];
  }
  return absolute_orientation(prob.world, cam);
}

}  // namespace

double reprojection_error(const RigidTransform& t, const Mat3& intrinsics,
                          const Correspondence3d2d& corr) {
  double u, v;
  const double depth = project_pinhole(intrinsics, t, corr.world, &u, &v);
  if (depth <= 0.0) return std::numeric_limits<double>::infinity();
  return std::hypot(u - corr.u, v - corr.v);
}

RigidTransform epnp(const std::vector<Correspondence3d2d>& corrs, const Mat3& intrinsics) {
  if (corrs.size() < 4)
    throw Error(ErrorCode::insufficient_correspondences,
                "epnp needs at least 4 correspondences");
  EpnpProblem prob;
  prob.k = intrinsics;
  for (const Correspondence3d2d& c : corrs) {
    prob.world.push_back(c.world);
    prob.pixels.emplace_back(c.u, c.v);
  }
  choose_control_points(&prob);
  const Eigen::MatrixXd m = build_m(prob);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.transpose() * m);

  const int dim = 3 * prob.num_ctrl;
  // A minimal non-planar sample (n = 4) leaves M with a 4-dimensional null
  // space; the true control points only lie in the span of all four kernel
  // vectors, so the beta cases must go up to N = 4 there.
  const int max_nb = prob.num_ctrl == 4 ? 4 : 2;
  Eigen::MatrixXd null_vecs = eig.eigenvectors().leftCols(std::max(max_nb, 1));

  RigidTransform best;
  double best_err = std::numeric_limits<double>::infinity();
  for (int nb = 1; nb <= max_nb && nb <= dim; ++nb) {
    Eigen::VectorXd betas;
    if (nb == 1) {
      // closed-form scale preserving control-point distances
      double num = 0.0, den = 0.0;
      for (const auto& [a, b] : ctrl_pairs(prob.num_ctrl)) {
        const Vec3 dv = null_vecs.col(0).segment<3>(3 * a) -
                        null_vecs.col(0).segment<3>(3 * b);
        num += dv.norm() * (prob.ctrl_world[a] - prob.ctrl_world[b]).norm();
        den += dv.squaredNorm();
      }
      betas = Eigen::VectorXd::Constant(1, den > 0 ? num / den : 0.0);
    } else {
      betas = solve_betas(null_vecs, nb, prob.ctrl_world, prob.num_ctrl);
    }
    gauss_newton_betas(null_vecs, nb, prob.ctrl_world, prob.num_ctrl, &betas);
    const RigidTransform t = pose_from_betas(prob, null_vecs, betas);
    const double err = reproj_rms(prob, t);
    if (err < best_err) {
      best_err = err;
      best = t;
    }
  }
  if (!std::isfinite(best_err))
    throw Error(ErrorCode::degenerate, "epnp found no valid pose");
  return best;
}

std::vector<Correspondence3d2d> lift_correspondences(
    const CorrespondenceSet& matches, const EdgeSet& edges_r, const EdgeSet& edges_c,
    const ProjectionMap& map, const LidarScan& scan, int* dropped) {
  std::vector<Correspondence3d2d> out;
  std::set<std::tuple<int, int, int, int>> seen;
  int drop_count = 0;
  for (const Match& m : matches) {
    const int row = edges_r.pixels(m.i, 0), col = edges_r.pixels(m.i, 1);
    const int crow = edges_c.pixels(m.j, 0), ccol = edges_c.pixels(m.j, 1);
    if (row < 0 || row >= map.rows() || col < 0 || col >= map.cols() ||
        !map.occupied(row, col)) {
      ++drop_count;
      continue;
    }
    if (!seen.insert({row, col, crow, ccol}).second) {
      ++drop_count;  // duplicate from edge padding
      continue;
    }
    Correspondence3d2d c;
    c.world = lift(map, row, col, scan);
    c.u = ccol;
    c.v = crow;
    out.push_back(c);
  }
  if (dropped) *dropped = drop_count;
  if (out.size() < 4)
    throw Error(ErrorCode::insufficient_correspondences,
                "fewer than 4 usable correspondences");
  return out;
}

namespace {

// True when prior^-1 ∘ cand is a yaw rotation plus an in-plane translation,
// within the configured tolerances.
bool within_prior_family(const RigidTransform& cand, const RansacOptions& opts) {
  if (!opts.prior) return true;
  const RigidTransform q = opts.prior->inverse().compose(cand);
  const double yaw = std::atan2(q.rotation(1, 0), q.rotation(0, 0));
  Mat3 unyaw;
  unyaw << std::cos(yaw), std::sin(yaw), 0, -std::sin(yaw), std::cos(yaw), 0, 0, 0, 1;
  const Mat3 residual = unyaw * q.rotation;
  const double cos_angle = std::clamp((residual.trace() - 1.0) / 2.0, -1.0, 1.0);
  if (std::acos(cos_angle) > opts.prior_rot_tol_rad) return false;
  return std::abs(q.translation.z()) <= opts.prior_tz_tol_m;
}

RigidTransform family_pose(const RigidTransform& prior, const Eigen::Vector3d& th) {
  RigidTransform q;
  const double c = std::cos(th(0)), s = std::sin(th(0));
  q.rotation << c, -s, 0, s, c, 0, 0, 0, 1;
  q.translation = Vec3(th(1), th(2), 0.0);
  return prior.compose(q);
}

// Refines `init` over the three decalibration parameters (yaw plus in-plane
// translation) by Gauss-Newton on the pixel reprojection residuals of the
// correspondences in `idx`. A free 6-DoF refit would re-admit the out-of-family
// drift the prior gate exists to exclude; restricting the refinement to the
// family keeps it well conditioned even on near-planar consensus sets.
RigidTransform refine_in_family(const std::vector<Correspondence3d2d>& corrs,
                                const std::vector<int>& idx, const Mat3& k,
                                const RigidTransform& prior, const RigidTransform& init) {
  const RigidTransform q = prior.inverse().compose(init);
  Eigen::Vector3d th(std::atan2(q.rotation(1, 0), q.rotation(0, 0)),
                     q.translation.x(), q.translation.y());
  const std::size_t m = idx.size();
  auto residuals = [&](const Eigen::Vector3d& p, Eigen::VectorXd* out) {
    const RigidTransform t = family_pose(prior, p);
    for (std::size_t r = 0; r < m; ++r) {
      double u, v;
      if (project_pinhole(k, t, corrs[idx[r]].world, &u, &v) <= 0.0) return false;
      (*out)(2 * r) = u - corrs[idx[r]].u;
      (*out)(2 * r + 1) = v - corrs[idx[r]].v;
    }
    return true;
  };
  Eigen::VectorXd res(2 * m), plus(2 * m), minus(2 * m);
  Eigen::MatrixXd jac(2 * m, 3);
  if (!residuals(th, &res)) return init;
  for (int iter = 0; iter < 15; ++iter) {
    constexpr double h = 1e-6;
    for (int c = 0; c < 3; ++c) {
      Eigen::Vector3d tp = th, tm = th;
      tp(c) += h;
      tm(c) -= h;
      if (!residuals(tp, &plus) || !residuals(tm, &minus)) return family_pose(prior, th);
      jac.col(c) = (plus - minus) / (2.0 * h);
    }
    const Eigen::Vector3d step =
        (jac.transpose() * jac).ldlt().solve(-jac.transpose() * res);
    th += step;
    if (!residuals(th, &res)) {
      th -= step;
      break;
    }
    if (step.norm() < 1e-10) break;
  }
  return family_pose(prior, th);
}

}  // namespace

namespace {

PoseEstimate ransac_epnp_canonical(const std::vector<Correspondence3d2d>& corrs,
                                   const Mat3& intrinsics, const RansacOptions& options) {
  const int n = static_cast<int>(corrs.size());
  if (n < 4)
    throw Error(ErrorCode::insufficient_correspondences,
                "ransac needs at least 4 correspondences");
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<int> pick(0, n - 1);

  std::vector<int> best_inliers;
  RigidTransform best_t;
  auto collect = [&](const RigidTransform& t) {
    std::vector<int> inliers;
    for (int i = 0; i < n; ++i)
      if (reprojection_error(t, intrinsics, corrs[i]) < options.epsilon_e)
        inliers.push_back(i);
    return inliers;
  };
  auto refit = [&](const std::vector<int>& idx, const RigidTransform& init) {
    if (options.prior) return refine_in_family(corrs, idx, intrinsics, *options.prior, init);
    std::vector<Correspondence3d2d> consensus;
    for (int i : idx) consensus.push_back(corrs[i]);
    return epnp(consensus, intrinsics);
  };
  int iters_needed = options.max_iterations;
  int it = 0;
  for (; it < std::min(iters_needed, options.max_iterations); ++it) {
    std::set<int> sample;
    while (static_cast<int>(sample.size()) < 4) sample.insert(pick(rng));
    std::vector<Correspondence3d2d> minimal;
    for (int idx : sample) minimal.push_back(corrs[idx]);
    RigidTransform t;
    try {
      t = epnp(minimal, intrinsics);
    } catch (const Error&) {
      continue;  // degenerate sample
    }
    if (!within_prior_family(t, options)) continue;
    std::vector<int> inliers = collect(t);
    if (inliers.size() >= 4 && inliers.size() > best_inliers.size()) {
      // Local optimization: a minimal-sample pose is noisy enough that its
      // consensus can stay confined to one depth layer; refitting on the
      // consensus and recollecting lets a near-correct hypothesis pull in
      // the inliers the raw sample missed before it competes for best.
      try {
        const RigidTransform refined = refit(inliers, t);
        if (within_prior_family(refined, options)) {
          std::vector<int> rin = collect(refined);
          if (rin.size() > inliers.size()) {
            t = refined;
            inliers = std::move(rin);
          }
        }
      } catch (const Error&) {
        // keep the raw hypothesis
      }
    }
    if (inliers.size() > best_inliers.size()) {
      best_inliers = std::move(inliers);
      best_t = t;
      const double w = static_cast<double>(best_inliers.size()) / n;
      if (w >= 1.0) {
        iters_needed = it + 1;
      } else if (w > 0.0) {
        const double denom = std::log(1.0 - std::pow(w, 4));
        if (denom < 0.0)
          iters_needed = static_cast<int>(
              std::ceil(std::log(1.0 - options.confidence) / denom));
      }
    }
  }
  if (best_inliers.size() < 4 && options.prior) {
    // Fallback for heavily contaminated match sets: a 4-point all-inlier
    // sample may never be drawn, but the decalibration family has only three
    // parameters, so three points suffice. Yaw spans the full circle and
    // Gauss-Newton is local, so each sample is refined from four yaw starts.
    std::vector<int> sample3(3);
    for (int it3 = 0; it3 < 300; ++it3) {
      std::set<int> sample;
      while (static_cast<int>(sample.size()) < 3) sample.insert(pick(rng));
      std::copy(sample.begin(), sample.end(), sample3.begin());
      for (int s = 0; s < 4; ++s) {
        const RigidTransform start =
            family_pose(*options.prior, Eigen::Vector3d(s * M_PI / 2.0, 0.0, 0.0));
        const RigidTransform t =
            refine_in_family(corrs, sample3, intrinsics, *options.prior, start);
        std::vector<int> inliers;
        for (int i = 0; i < n; ++i)
          if (reprojection_error(t, intrinsics, corrs[i]) < options.epsilon_e)
            inliers.push_back(i);
        if (inliers.size() > best_inliers.size()) {
          best_inliers = std::move(inliers);
          best_t = t;
        }
      }
    }
  }
  if (best_inliers.size() < 4)
    throw Error(ErrorCode::registration_failed, "no consensus with >= 4 inliers");

  // Refit on the consensus set with a tightening threshold: the consensus at
  // epsilon_e can include aliased matches whose residual is accidentally
  // small, and each shrink keeps only the coherent core of the previous fit.
  for (const double factor : {1.0, 0.6, 0.35}) {
    const double threshold = factor * options.epsilon_e;
    std::vector<int> stage;
    for (int i = 0; i < n; ++i)
      if (reprojection_error(best_t, intrinsics, corrs[i]) < threshold) stage.push_back(i);
    if (stage.size() < 4) break;
    RigidTransform refined;
    try {
      if (options.prior) {
        refined = refine_in_family(corrs, stage, intrinsics, *options.prior, best_t);
      } else {
        std::vector<Correspondence3d2d> consensus;
        for (int idx : stage) consensus.push_back(corrs[idx]);
        refined = epnp(consensus, intrinsics);
      }
    } catch (const Error&) {
      break;  // keep the previous pose if the refit degenerates
    }
    if (!within_prior_family(refined, options)) break;
    best_t = refined;
  }
  {
    std::vector<int> inliers;
    for (int i = 0; i < n; ++i)
      if (reprojection_error(best_t, intrinsics, corrs[i]) < options.epsilon_e)
        inliers.push_back(i);
    if (inliers.size() >= 4) best_inliers = std::move(inliers);
  }

  PoseEstimate est;
  est.transform = best_t;
  est.inliers = best_inliers;
  est.iterations_used = it;
  double acc = 0.0;
  for (int idx : best_inliers) {
    const double e = reprojection_error(best_t, intrinsics, corrs[idx]);
    acc += e * e;
  }
  est.reprojection_rmse = std::sqrt(acc / static_cast<double>(best_inliers.size()));
  return est;
}

}  // namespace

PoseEstimate ransac_epnp(const std::vector<Correspondence3d2d>& corrs,
                         const Mat3& intrinsics, const RansacOptions& options) {
  // Process the correspondences in a canonical order so that the result (same
  // seed) does not depend on how the caller happened to arrange them: the RNG
  // draws sample indices, and index meaning must be stable under shuffles.
  const int n = static_cast<int>(corrs.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](int i) {
    const Correspondence3d2d& c = corrs[i];
    return std::make_tuple(c.world.x(), c.world.y(), c.world.z(), c.u, c.v);
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });
  std::vector<Correspondence3d2d> canonical(n);
  for (int i = 0; i < n; ++i) canonical[i] = corrs[order[i]];

  PoseEstimate est = ransac_epnp_canonical(canonical, intrinsics, options);
  for (int& idx : est.inliers) idx = order[idx];
  std::sort(est.inliers.begin(), est.inliers.end());
  return est;
}

std::string pose_to_json(const PoseEstimate& est) {
  nlohmann::json j;
  std::vector<double> r;
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col) r.push_back(est.transform.rotation(row, col));
  j["rotation"] = r;
  j["translation"] = {est.transform.translation.x(), est.transform.translation.y(),
                      est.transform.translation.z()};
  j["inliers"] = est.inliers;
  j["reprojection_rmse"] = est.reprojection_rmse;
  j["iterations"] = est.iterations_used;
  return j.dump(2) + "\n";
}

}  // namespace regforge
