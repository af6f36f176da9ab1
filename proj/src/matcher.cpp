#include "regforge/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "regforge/io_util.hpp"

namespace regforge {
namespace {

constexpr double kSigmaClamp = 1e-7;

inline double clamp_sigma(double s) {
  return std::clamp(s, kSigmaClamp, 1.0 - kSigmaClamp);
}

double bce_mean(const Eigen::VectorXd& sigma, const Eigen::VectorXd& gt) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    const double s = clamp_sigma(sigma(i));
    acc += -(gt(i) * std::log(s) + (1.0 - gt(i)) * std::log(1.0 - s));
  }
  return acc / static_cast<double>(sigma.size());
}

}  // namespace

CorrespondenceSet extract_matches_fast(const Eigen::MatrixXf& s,
                                       const Eigen::VectorXf& sigma_r,
                                       const Eigen::VectorXf& sigma_c,
                                       double confidence_floor) {
  const int nr = static_cast<int>(s.rows()), nc = static_cast<int>(s.cols());
  if (sigma_r.size() != nr || sigma_c.size() != nc)
    throw Error(ErrorCode::contract, "matchability vector shape mismatch");

  Eigen::VectorXf lse_row(nr), lse_col(nc);
  {
    const Eigen::VectorXf rmax = s.rowwise().maxCoeff();
    lse_row = rmax + ((s.colwise() - rmax).array().exp().rowwise().sum()).log().matrix();
    const Eigen::VectorXf cmax = s.colwise().maxCoeff();
    Eigen::VectorXf csum(nc);
    for (int j = 0; j < nc; ++j)
      csum(j) = (s.col(j).array() - cmax(j)).exp().sum();
    lse_col = cmax + csum.array().log().matrix();
  }
  const Eigen::VectorXf tr =
      sigma_r.array().log().matrix() - lse_row;  // row-constant log terms
  const Eigen::VectorXf tc = sigma_c.array().log().matrix() - lse_col;

  // row argmax of 2*S_ij + tc_j; column argmax of 2*S_ij + tr_i
  std::vector<int> row_best(nr, 0), col_best(nc, 0);
  std::vector<float> col_val(nc, -std::numeric_limits<float>::infinity());
  for (int j = 0; j < nc; ++j) {
    int best = 0;
    float bv = 2.0f * s(0, j) + tr(0);
    for (int i = 1; i < nr; ++i) {
      const float v = 2.0f * s(i, j) + tr(i);
      if (v > bv) {
        bv = v;
        best = i;
      }
    }
    col_best[j] = best;
  }
  CorrespondenceSet matches;
  for (int i = 0; i < nr; ++i) {
    int jbest = 0;
    float bv = 2.0f * s(i, 0) + tc(0);
    for (int j = 1; j < nc; ++j) {
      const float v = 2.0f * s(i, j) + tc(j);
      if (v > bv) {
        bv = v;
        jbest = j;
      }
    }
    if (col_best[jbest] != i) continue;
    const double conf = std::exp(2.0 * s(i, jbest) - lse_row(i) - lse_col(jbest)) *
                        sigma_r(i) * sigma_c(jbest);
    if (conf >= confidence_floor) matches.push_back({i, jbest, conf});
  }
  return matches;
}

GroundTruthMatches gt_correspondences(const ProjectionMap& map, const LidarScan& scan,
                                      const EdgeSet& edges_r, const EdgeSet& edges_c,
                                      const RigidTransform& gt, const Mat3& intrinsics,
                                      double epsilon) {
  GroundTruthMatches out;
  out.sigma_r_gt = Eigen::VectorXd::Zero(edges_r.size());
  out.sigma_c_gt = Eigen::VectorXd::Zero(edges_c.size());
  const double eps2 = epsilon * epsilon;

  for (int i = 0; i < edges_r.size(); ++i) {
    const int row = edges_r.pixels(i, 0), col = edges_r.pixels(i, 1);
    if (row < 0 || row >= map.rows() || col < 0 || col >= map.cols() ||
        !map.occupied(row, col))
      continue;  // padded or void pixel: unmatchable
    const Vec3 world = lift(map, row, col, scan);
    double u, v;
    const double depth = project_pinhole(intrinsics, gt, world, &u, &v);
    if (depth <= 0.0) continue;

    int jbest = -1;
    double best_d2 = eps2;
    for (int j = 0; j < edges_c.size(); ++j) {
      const double dr = v - edges_c.pixels(j, 0);
      const double dc = u - edges_c.pixels(j, 1);
      const double d2 = dr * dr + dc * dc;
      if (d2 < best_d2) {
        best_d2 = d2;
        jbest = j;
      }
    }
    if (jbest < 0) continue;
    out.pairs.emplace_back(i, jbest);
    out.sigma_r_gt(i) = 1.0;
    out.sigma_c_gt(jbest) = 1.0;
  }
  return out;
}

LossValues losses(const Eigen::MatrixXd& p, const Eigen::VectorXd& sigma_r,
                  const Eigen::VectorXd& sigma_c, const GroundTruthMatches& gt) {
  if (!p.allFinite() || !sigma_r.allFinite() || !sigma_c.allFinite())
    throw Error(ErrorCode::numeric, "NaN/inf in loss inputs");
  LossValues out;
  out.l_sigma1 = bce_mean(sigma_r, gt.sigma_r_gt);
  out.l_sigma2 = bce_mean(sigma_c, gt.sigma_c_gt);
  if (gt.pairs.empty()) {
    out.lp_empty = true;
  } else {
    double acc = 0.0;
    for (const auto& [i, j] : gt.pairs) acc += std::log(std::max(p(i, j), 1e-300));
    out.l_p = -acc / static_cast<double>(gt.pairs.size());
  }
  out.total = out.l_sigma1 + out.l_sigma2 + out.l_p;
  return out;
}

MatchGradients loss_gradients(const Eigen::MatrixXd& desc_r,
                              const Eigen::MatrixXd& desc_c,
                              const MatchParams& params, const GroundTruthMatches& gt) {
  const int nr = static_cast<int>(desc_r.rows());
  const int nc = static_cast<int>(desc_c.rows());

  // forward
  Eigen::MatrixXd a = desc_r * params.lin_r;
  a.rowwise() += params.bias_r.transpose();
  Eigen::MatrixXd b = desc_c * params.lin_c;
  b.rowwise() += params.bias_c.transpose();
  const Eigen::MatrixXd s = a * b.transpose();
  const Eigen::VectorXd sigma_r = matchability<double>(desc_r, params.score_w_r, params.score_b_r);
  const Eigen::VectorXd sigma_c = matchability<double>(desc_c, params.score_w_c, params.score_b_c);
  const Eigen::MatrixXd row_sm = softmax_rows(s);
  const Eigen::MatrixXd col_sm = softmax_rows<double>(s.transpose()).transpose();
  const Eigen::MatrixXd p = partial_assignment(s, sigma_r, sigma_c);

  MatchGradients out;
  out.loss = losses(p, sigma_r, sigma_c, gt);

  const double inv_m = gt.pairs.empty() ? 0.0 : 1.0 / static_cast<double>(gt.pairs.size());
  Eigen::VectorXd row_hits = Eigen::VectorXd::Zero(nr);
  Eigen::VectorXd col_hits = Eigen::VectorXd::Zero(nc);
  Eigen::MatrixXd g_s = Eigen::MatrixXd::Zero(nr, nc);
  for (const auto& [i, j] : gt.pairs) {
    row_hits(i) += 1.0;
    col_hits(j) += 1.0;
    g_s.row(i) += inv_m * row_sm.row(i);
    g_s(i, j) -= inv_m;
    g_s.col(j) += inv_m * col_sm.col(j);
    g_s(i, j) -= inv_m;
  }

  // matchability heads: mean BCE plus the log sigma terms inside L_P; the
  // clamp zeroes the gradient where it saturates the forward value
  Eigen::VectorXd dz_r(nr), dz_c(nc);
  for (int i = 0; i < nr; ++i) {
    const bool clamped = sigma_r(i) < kSigmaClamp || sigma_r(i) > 1.0 - kSigmaClamp;
    dz_r(i) = clamped ? 0.0
                      : (sigma_r(i) - gt.sigma_r_gt(i)) / nr -
                            row_hits(i) * inv_m * (1.0 - sigma_r(i));
  }
  for (int j = 0; j < nc; ++j) {
    const bool clamped = sigma_c(j) < kSigmaClamp || sigma_c(j) > 1.0 - kSigmaClamp;
    dz_c(j) = clamped ? 0.0
                      : (sigma_c(j) - gt.sigma_c_gt(j)) / nc -
                            col_hits(j) * inv_m * (1.0 - sigma_c(j));
  }

  const Eigen::MatrixXd d_a = g_s * b;
  const Eigen::MatrixXd d_b = g_s.transpose() * a;

  out.params.lin_r = desc_r.transpose() * d_a;
  out.params.lin_c = desc_c.transpose() * d_b;
  out.params.bias_r = d_a.colwise().sum();
  out.params.bias_c = d_b.colwise().sum();
  out.params.score_w_r = desc_r.transpose() * dz_r;
  out.params.score_w_c = desc_c.transpose() * dz_c;
  out.params.score_b_r = dz_r.sum();
  out.params.score_b_c = dz_c.sum();

  out.desc_r = d_a * params.lin_r.transpose() + dz_r * params.score_w_r.transpose();
  out.desc_c = d_b * params.lin_c.transpose() + dz_c * params.score_w_c.transpose();
  return out;
}

Eigen::MatrixXd reduce_and_normalize(const Eigen::MatrixXd& fused,
                                     const ReductionMap& reduction,
                                     Eigen::MatrixXd* pre_out) {
  Eigen::MatrixXd pre = fused * reduction.transpose();
  Eigen::MatrixXd out = pre;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm > 1e-12) out.row(i) /= norm;
  }
  if (pre_out) *pre_out = std::move(pre);
  return out;
}

ReductionMap reduction_gradient(const Eigen::MatrixXd& fused, const Eigen::MatrixXd& pre,
                                const Eigen::MatrixXd& d_desc) {
  Eigen::MatrixXd d_pre(pre.rows(), pre.cols());
  for (Eigen::Index i = 0; i < pre.rows(); ++i) {
    const double norm = pre.row(i).norm();
    if (norm <= 1e-12) {
      d_pre.row(i).setZero();
      continue;
    }
    const Eigen::RowVectorXd unit = pre.row(i) / norm;
    d_pre.row(i) = (d_desc.row(i) - (d_desc.row(i).dot(unit)) * unit) / norm;
  }
  return d_pre.transpose() * fused;
}

void save_match_params(const MatchParams& params, const std::string& prefix,
                       std::uint64_t seed, const std::string& note) {
  const int dim = static_cast<int>(params.lin_r.rows());
  std::vector<float> buf;
  auto push_mat = [&buf](const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        buf.push_back(static_cast<float>(m(r, c)));
  };
  push_mat(params.lin_r);
  push_mat(params.lin_c);
  push_mat(params.bias_r);
  push_mat(params.bias_c);
  push_mat(params.score_w_r);
  push_mat(params.score_w_c);
  buf.push_back(static_cast<float>(params.score_b_r));
  buf.push_back(static_cast<float>(params.score_b_c));
  atomic_write(prefix + ".bin", reinterpret_cast<const char*>(buf.data()),
               buf.size() * sizeof(float));

  nlohmann::json manifest;
  manifest["dim"] = dim;
  manifest["seed"] = seed;
  manifest["note"] = note;
  manifest["layout"] = {"lin_r", "lin_c", "bias_r", "bias_c",
                        "score_w_r", "score_w_c", "score_b_r", "score_b_c"};
  atomic_write(prefix + ".json", manifest.dump(2) + "\n");
}

MatchParams load_match_params(const std::string& prefix) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_text_file(prefix + ".json"));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::format, std::string("bad params manifest: ") + e.what());
  }
  const int dim = manifest.at("dim");
  const std::string raw = read_text_file(prefix + ".bin");
  const std::size_t expect = (2 * dim * dim + 4 * dim + 2) * sizeof(float);
  if (raw.size() != expect)
    throw Error(ErrorCode::format, "params binary has unexpected size");
  const auto* f = reinterpret_cast<const float*>(raw.data());
  MatchParams p = MatchParams::identity(dim);
  auto pull_mat = [&f](Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = *f++;
  };
  pull_mat(p.lin_r);
  pull_mat(p.lin_c);
  Eigen::MatrixXd tmp;
  tmp.resize(dim, 1);
  pull_mat(tmp);
  p.bias_r = tmp;
  pull_mat(tmp);
  p.bias_c = tmp;
  pull_mat(tmp);
  p.score_w_r = tmp;
  pull_mat(tmp);
  p.score_w_c = tmp;
  p.score_b_r = *f++;
  p.score_b_c = *f++;
  return p;
}

std::string correspondences_to_csv(const CorrespondenceSet& matches,
                                   const EdgeSet& edges_r, const EdgeSet& edges_c) {
  std::ostringstream out;
  out << "i,j,confidence,row_r,col_r,row_c,col_c\n";
  for (const Match& m : matches)
    out << m.i << "," << m.j << "," << m.confidence << "," << edges_r.pixels(m.i, 0)
        << "," << edges_r.pixels(m.i, 1) << "," << edges_c.pixels(m.j, 0) << ","
        << edges_c.pixels(m.j, 1) << "\n";
  return out.str();
}

}  // namespace regforge
