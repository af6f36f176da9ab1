// Acceptance gate: one pass/fail line per criterion, pinned tolerances.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "regforge/pipeline.hpp"
#include "regforge/train.hpp"

using namespace regforge;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %2d [%s]: %s\n", criterion, pass ? "pass" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

Mat3 test_intrinsics() {
  Mat3 k;
  k << 500.0, 0.0, 320.0, 0.0, 500.0, 240.0, 0.0, 0.0, 1.0;
  return k;
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Quaterniond q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
  q.normalize();
  return q.toRotationMatrix();
}

struct Fixture {
  RigidTransform pose;
  std::vector<Correspondence3d2d> corrs;
};

Fixture make_fixture(std::uint64_t seed, int n, bool planar) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> xy(-2.0, 2.0), z(4.0, 10.0);
  Fixture f;
  f.pose.rotation = random_rotation(rng);
  f.pose.translation = Vec3(xy(rng), xy(rng), z(rng));
  const RigidTransform inv = f.pose.inverse();
  const Mat3 k = test_intrinsics();
  const double plane_z = z(rng);
  for (int i = 0; i < n; ++i) {
    const Vec3 cam(xy(rng), xy(rng), planar ? plane_z : z(rng));
    Correspondence3d2d c;
    c.world = inv.apply(cam);
    double u, v;
    project_pinhole(k, f.pose, c.world, &u, &v);
    c.u = u;
    c.v = v;
    f.corrs.push_back(c);
  }
  return f;
}

// ---------------------------------------------------------------------------
// 1. Scope disclaimer.
// ---------------------------------------------------------------------------
void criterion_1() {
  report(1, true,
         "scope: published full-system numbers (RTE 0.54+/-0.85 m, RRE 2.97+/-3.05 deg, "
         "Acc 85.74%, 0.015 s/frame) require a trained ResNet-34 backbone on KITTI with "
         "GPU inference and are not reproduced here; this gate validates the pipeline "
         "through exact oracles, analytic-gradient checks, and desk-scale synthetic runs");
}

// ---------------------------------------------------------------------------
// 2. Projection round-trip: invertibility and depth values, < 1 s per scan.
// ---------------------------------------------------------------------------
void criterion_2() {
  bool pass = true;
  std::string detail;
  double worst_depth = 0.0;
  long long occupied = 0, mismatched = 0;
  double worst_time = 0.0;
  int scans = 0;

  auto check_scan = [&](const LidarScan& scan, const char* label) {
    for (const MapKind kind : {MapKind::reflectance, MapKind::depth}) {
      const double t0 = now_seconds();
      const ProjectionMap map = project(scan, 1024, kind);
      for (int r = 0; r < map.rows(); ++r)
        for (int c = 0; c < map.cols(); ++c) {
          if (!map.occupied(r, c)) continue;
          ++occupied;
          const Vec3 p = lift(map, r, c, scan);
          const int idx = map.index(r, c);
          if (scan.points[idx].ring != r ||
              azimuth_column(spherical_coords(p).phi, map.cols()) != c)
            ++mismatched;
          if (kind == MapKind::depth)
            worst_depth = std::max(worst_depth, std::abs(map.values(r, c) - p.norm()));
        }
      worst_time = std::max(worst_time, now_seconds() - t0);
      ++scans;
      (void)label;
    }
  };

  for (const std::uint64_t seed : {42ull, 43ull, 44ull}) {
    const SyntheticScene scene =
        generate_synthetic_scene(seed, make_scene(SceneKind::wall_grid, seed, SceneScale{}));
    check_scan(scene.scan, "synthetic");
  }

  const char* kitti_path = std::getenv("KITTI_SCAN");
  bool real_scan = false;
  if (kitti_path != nullptr) {
    check_scan(load_kitti_scan(kitti_path), "kitti");
    real_scan = true;
  }

  pass = occupied > 0 && mismatched == 0 && worst_depth <= 1e-6 && worst_time < 1.0;
  detail = fmt(
      "projection round-trip: %lld occupied pixels over %d projections, %lld "
      "re-projection mismatches (tol 0), max |depth - range| %.2e (tol 1e-6), max "
      "%.3f s/scan (budget 1 s)%s",
      occupied, scans, mismatched, worst_depth, worst_time,
      real_scan ? ", incl. real KITTI scan"
                : "; synthetic scans only (set KITTI_SCAN for a real scan)");
  report(2, pass, detail);
}

// ---------------------------------------------------------------------------
// 3. Sobel negation duality, known step response, constant rejection,
//    wavelet identity at infinite threshold.
// ---------------------------------------------------------------------------
void criterion_3() {
  bool duality = true;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pix(0.0, 255.0);
  std::uniform_int_distribution<int> pix_int(0, 255);
  for (int trial = 0; trial < 5; ++trial) {
    // Integer-valued pixels keep both I and 255 - I exactly representable, so
    // the duality |G(I)| = |G(255 - I)| holds with zero tolerance.
    GrayImage img;
    img.values.resize(24, 31);
    for (int r = 0; r < img.rows(); ++r)
      for (int c = 0; c < img.cols(); ++c) img.values(r, c) = pix_int(rng);
    GrayImage neg;
    neg.values = 255.0 - img.values.array();
    if ((sobel_response(img) - sobel_response(neg)).cwiseAbs().maxCoeff() > 0.0)
      duality = false;
  }

  GrayImage step;
  step.values.resize(32, 32);
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 32; ++c) step.values(r, c) = c < 16 ? 0.0 : 255.0;
  const Eigen::MatrixXd g = sobel_response(step);
  const bool step_ok = g(10, 15) == 1020.0 && g(10, 16) == 1020.0 &&
                       g(10, 14) == 0.0 && g(10, 17) == 0.0;

  bool constant_ok = false;
  GrayImage flat;
  flat.values = Eigen::MatrixXd::Constant(16, 16, 37.0);
  try {
    sobel_edges(flat, 50.0, 10);
  } catch (const Error& e) {
    constant_ok = e.code() == ErrorCode::empty_input;
  }

  GrayImage noisy;
  noisy.values.resize(20, 26);
  for (int r = 0; r < 20; ++r)
    for (int c = 0; c < 26; ++c) noisy.values(r, c) = pix(rng);
  const GrayImage ident = wavelet_filter(noisy, kWaveletIdentityThreshold);
  const double ident_err = (ident.values - noisy.values).cwiseAbs().maxCoeff();

  report(3, duality && step_ok && constant_ok && ident_err <= 1e-9,
         fmt("edge operators: negation duality exact on 5 random images [%s], vertical "
             "step response G=1020 at adjacent columns [%s], constant image rejected as "
             "empty-input [%s], infinite-threshold wavelet identity err %.2e (tol 1e-9)",
             duality ? "ok" : "FAIL", step_ok ? "ok" : "FAIL",
             constant_ok ? "ok" : "FAIL", ident_err));
}

// ---------------------------------------------------------------------------
// Shared random matching problem for criteria 4 and 5.
// ---------------------------------------------------------------------------
struct MatchProblem {
  Eigen::MatrixXd desc_r, desc_c;
  MatchParams params;
  GroundTruthMatches gt;
};

MatchProblem make_match_problem(std::uint64_t seed, int nr, int nc, int dim) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto fill = [&](Eigen::MatrixXd& m, int rows, int cols) {
    m.resize(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m(r, c) = gauss(rng);
  };
  MatchProblem prob;
  fill(prob.desc_r, nr, dim);
  fill(prob.desc_c, nc, dim);
  prob.desc_r.rowwise().normalize();
  prob.desc_c.rowwise().normalize();
  prob.params = MatchParams::identity(dim);
  fill(prob.params.lin_r, dim, dim);
  fill(prob.params.lin_c, dim, dim);
  Eigen::MatrixXd tmp;
  fill(tmp, dim, 1);
  prob.params.bias_r = tmp;
  fill(tmp, dim, 1);
  prob.params.bias_c = tmp;
  fill(tmp, dim, 1);
  prob.params.score_w_r = tmp;
  fill(tmp, dim, 1);
  prob.params.score_w_c = tmp;
  prob.params.score_b_r = gauss(rng);
  prob.params.score_b_c = gauss(rng);
  prob.gt.sigma_r_gt = Eigen::VectorXd::Zero(nr);
  prob.gt.sigma_c_gt = Eigen::VectorXd::Zero(nc);
  std::uniform_int_distribution<int> pick_c(0, nc - 1);
  for (int i = 0; i < nr; i += 2) {
    const int j = pick_c(rng);
    prob.gt.pairs.emplace_back(i, j);
    prob.gt.sigma_r_gt(i) = 1.0;
    prob.gt.sigma_c_gt(j) = 1.0;
  }
  return prob;
}

// ---------------------------------------------------------------------------
// 4. Matching layer against brute-force oracles; softmax normalization;
//    shift invariance of the assignment.
// ---------------------------------------------------------------------------
void criterion_4() {
  double worst_oracle = 0.0, worst_norm = 0.0, worst_shift = 0.0;
  for (const std::uint64_t seed : {11ull, 22ull, 33ull, 44ull, 55ull}) {
    const MatchProblem prob = make_match_problem(seed, 8, 10, 6);

    // Brute-force references, written directly from the definitions.
    Eigen::MatrixXd s_ref(8, 10);
    for (int i = 0; i < 8; ++i) {
      const Eigen::VectorXd a =
          prob.params.lin_r.transpose() * prob.desc_r.row(i).transpose() +
          prob.params.bias_r;
      for (int j = 0; j < 10; ++j) {
        const Eigen::VectorXd b =
            prob.params.lin_c.transpose() * prob.desc_c.row(j).transpose() +
            prob.params.bias_c;
        s_ref(i, j) = a.dot(b);
      }
    }
    auto softmax_ref = [](const Eigen::MatrixXd& m) {
      Eigen::MatrixXd out(m.rows(), m.cols());
      for (int i = 0; i < m.rows(); ++i) {
        double denom = 0.0;
        for (int j = 0; j < m.cols(); ++j) denom += std::exp(m(i, j));
        for (int j = 0; j < m.cols(); ++j) out(i, j) = std::exp(m(i, j)) / denom;
      }
      return out;
    };

    const Eigen::MatrixXd s = score_matrix<double>(prob.desc_r, prob.desc_c, prob.params);
    worst_oracle = std::max(worst_oracle, (s - s_ref).cwiseAbs().maxCoeff());

    const Eigen::VectorXd sr =
        matchability<double>(prob.desc_r, prob.params.score_w_r, prob.params.score_b_r);
    const Eigen::VectorXd sc =
        matchability<double>(prob.desc_c, prob.params.score_w_c, prob.params.score_b_c);

    const Eigen::MatrixXd row_sm = softmax_ref(s_ref);
    const Eigen::MatrixXd col_sm = softmax_ref(s_ref.transpose()).transpose();
    Eigen::MatrixXd p_ref(8, 10);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 10; ++j)
        p_ref(i, j) = row_sm(i, j) * col_sm(i, j) * sr(i) * sc(j);
    const Eigen::MatrixXd p = partial_assignment<double>(s, sr, sc);
    worst_oracle = std::max(worst_oracle, (p - p_ref).cwiseAbs().maxCoeff());

    const Eigen::MatrixXd rows = softmax_rows<double>(s);
    const Eigen::MatrixXd cols = softmax_rows<double>(s.transpose().eval());
    worst_norm = std::max(worst_norm,
                          (rows.rowwise().sum().array() - 1.0).abs().maxCoeff());
    worst_norm = std::max(worst_norm,
                          (cols.rowwise().sum().array() - 1.0).abs().maxCoeff());

    const Eigen::MatrixXd shifted = s.array() + 17.25;
    worst_shift = std::max(
        worst_shift,
        (partial_assignment<double>(shifted, sr, sc) - p).cwiseAbs().maxCoeff());
  }
  report(4, worst_oracle <= 1e-10 && worst_norm <= 1e-6 && worst_shift <= 1e-9,
         fmt("matching oracles (5 seeds, 8x10): max |impl - brute force| %.2e (tol 1e-10), "
             "softmax row/col normalization err %.2e (tol 1e-6), score-shift invariance "
             "of the assignment %.2e (tol 1e-9)",
             worst_oracle, worst_norm, worst_shift));
}

// ---------------------------------------------------------------------------
// 5. Finite-difference check of the analytic gradients.
// ---------------------------------------------------------------------------
void criterion_5() {
  const double t0 = now_seconds();
  const double h = 1e-5;
  double worst = 0.0;
  for (const std::uint64_t seed : {101ull, 202ull, 303ull}) {
    MatchProblem prob = make_match_problem(seed, 8, 10, 6);
    const MatchGradients grads =
        loss_gradients(prob.desc_r, prob.desc_c, prob.params, prob.gt);

    auto loss_at = [&](const MatchParams& params, const Eigen::MatrixXd& dr,
                       const Eigen::MatrixXd& dc) {
      const Eigen::MatrixXd s = score_matrix<double>(dr, dc, params);
      const Eigen::VectorXd sr = matchability<double>(dr, params.score_w_r, params.score_b_r);
      const Eigen::VectorXd sc = matchability<double>(dc, params.score_w_c, params.score_b_c);
      return losses(partial_assignment(s, sr, sc), sr, sc, prob.gt).total;
    };
    auto rel = [&](double analytic, double fd) {
      const double denom = std::max({std::abs(analytic), std::abs(fd), 1e-6});
      return std::abs(analytic - fd) / denom;
    };
    auto probe = [&](double* slot, double analytic) {
      const double saved = *slot;
      *slot = saved + h;
      const double up = loss_at(prob.params, prob.desc_r, prob.desc_c);
      *slot = saved - h;
      const double down = loss_at(prob.params, prob.desc_r, prob.desc_c);
      *slot = saved;
      worst = std::max(worst, rel(analytic, (up - down) / (2.0 * h)));
    };

    auto probe_matrix = [&](Eigen::MatrixXd& m, const Eigen::MatrixXd& g) {
      for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) probe(&m(r, c), g(r, c));
    };
    auto probe_vector = [&](Eigen::VectorXd& v, const Eigen::VectorXd& g) {
      for (int r = 0; r < v.size(); ++r) probe(&v(r), g(r));
    };
    probe_matrix(prob.params.lin_r, grads.params.lin_r);
    probe_matrix(prob.params.lin_c, grads.params.lin_c);
    probe_vector(prob.params.bias_r, grads.params.bias_r);
    probe_vector(prob.params.bias_c, grads.params.bias_c);
    probe_vector(prob.params.score_w_r, grads.params.score_w_r);
    probe_vector(prob.params.score_w_c, grads.params.score_w_c);
    probe(&prob.params.score_b_r, grads.params.score_b_r);
    probe(&prob.params.score_b_c, grads.params.score_b_c);
    probe_matrix(prob.desc_r, grads.desc_r);
    probe_matrix(prob.desc_c, grads.desc_c);
  }
  const double elapsed = now_seconds() - t0;
  report(5, worst < 1e-4 && elapsed < 10.0,
         fmt("analytic vs central-difference gradients (3 seeds, h=1e-5, every parameter "
             "block + input descriptors): max rel err %.2e (tol 1e-4) in %.2f s (budget "
             "10 s)",
             worst, elapsed));
}

// ---------------------------------------------------------------------------
// 6. EPnP exactness on noiseless general and planar configurations.
// ---------------------------------------------------------------------------
void criterion_6() {
  const double t0 = now_seconds();
  double worst_general = 0.0, worst_planar = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Fixture f = make_fixture(seed, 8, false);
    const RigidTransform est = epnp(f.corrs, test_intrinsics());
    worst_general = std::max(worst_general,
                             std::max((est.rotation - f.pose.rotation).norm(),
                                      (est.translation - f.pose.translation).norm()));
  }
  for (std::uint64_t seed = 1000; seed < 1100; ++seed) {
    const Fixture f = make_fixture(seed, 4, true);
    const RigidTransform est = epnp(f.corrs, test_intrinsics());
    worst_planar = std::max(worst_planar,
                            std::max((est.rotation - f.pose.rotation).norm(),
                                     (est.translation - f.pose.translation).norm()));
  }
  const double elapsed = now_seconds() - t0;
  report(6, worst_general <= 1e-5 && worst_planar <= 1e-5 && elapsed < 5.0,
         fmt("epnp noiseless exactness over 100 random poses each: general 8-point max "
             "err %.2e, planar 4-point max err %.2e (tol 1e-5, rotation and translation) "
             "in %.2f s (budget 5 s)",
             worst_general, worst_planar, elapsed));
}

// ---------------------------------------------------------------------------
// 7. RANSAC outlier rejection over 50 seeded trials + pure-outlier failure.
// ---------------------------------------------------------------------------
void criterion_7() {
  double worst_rre = 0.0, worst_rte = 0.0;
  int worst_recovered = 50;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Fixture f = make_fixture(seed, 50, false);
    std::mt19937_64 rng(seed ^ 0xfeedULL);
    std::uniform_real_distribution<double> u_pix(0.0, 640.0), v_pix(0.0, 480.0);
    std::uniform_real_distribution<double> xy(-2.0, 2.0), z(4.0, 10.0);
    const RigidTransform inv = f.pose.inverse();
    for (int i = 0; i < 50; ++i) {
      Correspondence3d2d c;
      c.world = inv.apply(Vec3(xy(rng), xy(rng), z(rng)));
      c.u = u_pix(rng);
      c.v = v_pix(rng);
      f.corrs.push_back(c);
    }
    RansacOptions opts;
    opts.seed = seed;
    opts.epsilon_e = 6.0;
    const PoseEstimate est = ransac_epnp(f.corrs, test_intrinsics(), opts);
    worst_rre = std::max(worst_rre, rre(f.pose.rotation, est.transform.rotation));
    worst_rte = std::max(worst_rte, rte(f.pose.translation, est.transform.translation));
    int recovered = 0;
    for (const int idx : est.inliers)
      if (idx < 50) ++recovered;
    worst_recovered = std::min(worst_recovered, recovered);
  }

  bool pure_outliers_fail = false;
  {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u_pix(0.0, 640.0), v_pix(0.0, 480.0);
    std::uniform_real_distribution<double> xyz(-5.0, 5.0);
    std::vector<Correspondence3d2d> corrs;
    for (int i = 0; i < 40; ++i) {
      Correspondence3d2d c;
      c.world = Vec3(xyz(rng), xyz(rng), xyz(rng) + 20.0);
      c.u = u_pix(rng);
      c.v = v_pix(rng);
      corrs.push_back(c);
    }
    RansacOptions opts;
    opts.epsilon_e = 0.05;
    try {
      ransac_epnp(corrs, test_intrinsics(), opts);
    } catch (const Error& e) {
      pure_outliers_fail = e.code() == ErrorCode::registration_failed;
    }
  }

  report(7,
         worst_rre < 0.1 && worst_rte < 0.05 && worst_recovered >= 49 &&
             pure_outliers_fail,
         fmt("ransac, 50 exact inliers + 50 uniform outliers, eps_e=6, 50 seeded trials: "
             "max rre %.2e deg (tol 0.1), max rte %.2e m (tol 0.05), min true inliers "
             "recovered %d/50 (>= 98%%); all-outlier input raises registration-failed "
             "[%s]",
             worst_rre, worst_rte, worst_recovered, pure_outliers_fail ? "ok" : "FAIL"));
}

// ---------------------------------------------------------------------------
// 8. Toy training then held-out evaluation.
// ---------------------------------------------------------------------------
void criterion_8() {
  const double t0 = now_seconds();
  const PipelineConfig cfg;
  TrainOptions opts;  // 30 epochs, lr 0.001, batch 16, 200 scenes
  const TrainReport rep = toy_train(opts, cfg);
  const std::vector<RegistrationResult> results =
      evaluate_synthetic(5000, 50, SceneKind::wall_grid, SceneScale{}, rep.params,
                         rep.reduction, cfg);
  const Summary s = aggregate(results);
  const double elapsed = now_seconds() - t0;
  report(8, s.acc_percent >= 80.0 && s.bad_percent <= 5.0 && elapsed < 600.0,
         fmt("toy training (30 epochs, lr 0.001, batch 16, 200 scenes, two-stage "
             "perturbations) then 50 held-out scenes: Acc %.1f%% (>= 80), Bad %.1f%% "
             "(<= 5), total %.1f s (budget 600 s); final epoch loss %.4f",
             s.acc_percent, s.bad_percent, elapsed,
             rep.epoch_loss.empty() ? 0.0 : rep.epoch_loss.back()));
}

// ---------------------------------------------------------------------------
// 9. Reflectance map beats depth map on texture-only scenes.
// ---------------------------------------------------------------------------
void criterion_9() {
  const MatchParams params = MatchParams::identity(kDescriptorDim);
  const ReductionMap reduction = make_default_reduction();
  PipelineConfig refl_cfg;
  PipelineConfig depth_cfg;
  depth_cfg.map_kind = MapKind::depth;
  const Summary refl = aggregate(evaluate_synthetic(
      300, 30, SceneKind::stripe_wall, SceneScale{}, params, reduction, refl_cfg));
  const Summary depth = aggregate(evaluate_synthetic(
      300, 30, SceneKind::stripe_wall, SceneScale{}, params, reduction, depth_cfg));
  report(9, refl.acc_percent >= depth.acc_percent + 20.0,
         fmt("reflectance vs depth map on 30 texture-only stripe scenes: Acc %.1f%% vs "
             "%.1f%% (margin %.1f, required >= 20 points)",
             refl.acc_percent, depth.acc_percent,
             refl.acc_percent - depth.acc_percent));
}

// ---------------------------------------------------------------------------
// 10. Reprojection threshold sweep: tighter threshold costs time, not accuracy.
// ---------------------------------------------------------------------------
void criterion_10() {
  const MatchParams params = MatchParams::identity(kDescriptorDim);
  const ReductionMap reduction = make_default_reduction();
  auto run_at = [&](double eps_e, double* wall_out) {
    PipelineConfig cfg;
    cfg.epsilon_e = eps_e;
    const double t0 = now_seconds();
    const Summary s = aggregate(evaluate_synthetic(
        300, 30, SceneKind::wall_grid, SceneScale{}, params, reduction, cfg));
    *wall_out = now_seconds() - t0;
    return s;
  };
  double wall_tight = 0.0, wall_loose = 0.0;
  const Summary tight = run_at(2.0, &wall_tight);
  const Summary loose = run_at(8.0, &wall_loose);
  const double acc_range = std::abs(tight.acc_percent - loose.acc_percent);
  report(10, wall_tight > wall_loose && acc_range < 10.0,
         fmt("eps_e sweep on 30 grid scenes: wall time %.2f s at eps_e=2 vs %.2f s at "
             "eps_e=8 (tighter must cost more), Acc %.1f%% vs %.1f%% (range %.1f < 10 "
             "points)",
             wall_tight, wall_loose, tight.acc_percent, loose.acc_percent, acc_range));
}

// ---------------------------------------------------------------------------
// 11. Full-resolution latency budget for the non-training pipeline.
// ---------------------------------------------------------------------------
void criterion_11() {
  const PipelineConfig cfg;  // n_edges = 3000
  const MatchParams params = MatchParams::identity(kDescriptorDim);
  const ReductionMap reduction = make_default_reduction();
  const SceneScale full{64, 1024, 160, 512};
  StageTimes sum;
  double worst = 0.0;
  const int scenes = 10;
  for (std::uint64_t seed = 500; seed < 500 + scenes; ++seed) {
    PipelineArtifacts art;
    run_synthetic_scene(seed, make_scene(SceneKind::wall_grid, seed, full), params,
                        reduction, cfg, &art);
    sum.project += art.times.project;
    sum.edges += art.times.edges;
    sum.describe += art.times.describe;
    sum.match += art.times.match;
    sum.pose += art.times.pose;
    worst = std::max(worst, art.times.total());
  }
  const double mean = sum.total() / scenes;
  report(11, mean < 0.1,
         fmt("pipeline latency at 64x1024 map / 160x512 image / 3000 edges, 10 scenes: "
             "mean %.4f s (budget 0.1 s/scene), max %.4f s; stage means project %.4f, "
             "edges %.4f, describe %.4f, match %.4f, pose %.4f s",
             mean, worst, sum.project / scenes, sum.edges / scenes,
             sum.describe / scenes, sum.match / scenes, sum.pose / scenes));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  std::printf("%s: %d/11 criteria passed\n", g_failures == 0 ? "PASS" : "FAIL",
              11 - g_failures);
  return g_failures;
}
