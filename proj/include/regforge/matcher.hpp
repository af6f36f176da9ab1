#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "regforge/descriptor.hpp"
#include "regforge/image_ops.hpp"
#include "regforge/projection.hpp"
#include "regforge/types.hpp"

namespace regforge {

template <typename T>
using MatX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using VecX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// Two per-branch linear maps feeding the score matrix plus the two scalar
// matchability heads.
template <typename T>
struct MatchParamsT {
  MatX<T> lin_r, lin_c;            // C_d x C_d
  VecX<T> bias_r, bias_c;          // C_d
  VecX<T> score_w_r, score_w_c;    // C_d
  T score_b_r{}, score_b_c{};

  static MatchParamsT identity(int dim) {
    MatchParamsT p;
    p.lin_r = MatX<T>::Identity(dim, dim);
    p.lin_c = MatX<T>::Identity(dim, dim);
    p.bias_r = VecX<T>::Zero(dim);
    p.bias_c = VecX<T>::Zero(dim);
    p.score_w_r = VecX<T>::Zero(dim);
    p.score_w_c = VecX<T>::Zero(dim);
    return p;
  }

  template <typename U>
  MatchParamsT<U> cast() const {
    MatchParamsT<U> out;
    out.lin_r = lin_r.template cast<U>();
    out.lin_c = lin_c.template cast<U>();
    out.bias_r = bias_r.template cast<U>();
    out.bias_c = bias_c.template cast<U>();
    out.score_w_r = score_w_r.template cast<U>();
    out.score_w_c = score_w_c.template cast<U>();
    out.score_b_r = static_cast<U>(score_b_r);
    out.score_b_c = static_cast<U>(score_b_c);
    return out;
  }
};

using MatchParams = MatchParamsT<double>;

enum class CombineMode { product, mean };

struct Match {
  int i = 0;  // reflectance edge index
  int j = 0;  // camera edge index
  double confidence = 0.0;
};
using CorrespondenceSet = std::vector<Match>;

// S = (D_r W_r + b_r)(D_c W_c + b_c)^T
template <typename T>
MatX<T> score_matrix(const MatX<T>& desc_r, const MatX<T>& desc_c,
                     const MatchParamsT<T>& params) {
  if (desc_r.cols() != desc_c.cols() || desc_r.cols() != params.lin_r.rows())
    throw Error(ErrorCode::contract, "descriptor dimension mismatch");
  MatX<T> a = desc_r * params.lin_r;
  a.rowwise() += params.bias_r.transpose();
  MatX<T> b = desc_c * params.lin_c;
  b.rowwise() += params.bias_c.transpose();
  return a * b.transpose();
}

template <typename T>
VecX<T> matchability(const MatX<T>& desc, const VecX<T>& weights, T bias) {
  if (desc.cols() != weights.size())
    throw Error(ErrorCode::contract, "matchability head dimension mismatch");
  VecX<T> z = desc * weights;
  z.array() += bias;
  return (T(1) / (T(1) + (-z.array()).exp())).matrix();
}

template <typename T>
MatX<T> softmax_rows(const MatX<T>& s) {
  const VecX<T> m = s.rowwise().maxCoeff();
  MatX<T> e = (s.colwise() - m).array().exp().matrix();
  const VecX<T> sums = e.rowwise().sum();
  return e.array().colwise() / sums.array();
}

// P_ij = rowsoftmax(S)_ij * colsoftmax(S)_ij * sigma_r_i * sigma_c_j
// (mean mode averages the two softmaxes instead)
template <typename T>
MatX<T> partial_assignment(const MatX<T>& s, const VecX<T>& sigma_r,
                           const VecX<T>& sigma_c,
                           CombineMode mode = CombineMode::product) {
  if (sigma_r.size() != s.rows() || sigma_c.size() != s.cols())
    throw Error(ErrorCode::contract, "matchability vector shape mismatch");
  const MatX<T> row_sm = softmax_rows(s);
  const MatX<T> col_sm = softmax_rows<T>(s.transpose()).transpose();
  MatX<T> p = mode == CombineMode::product
                  ? row_sm.cwiseProduct(col_sm)
                  : ((row_sm + col_sm) * T(0.5)).eval();
  p.array().colwise() *= sigma_r.array();
  p.array().rowwise() *= sigma_c.transpose().array();
  return p;
}

// Mutual-max rule; argmax ties break toward the smallest index.
template <typename T>
CorrespondenceSet extract_matches(const MatX<T>& p, double confidence_floor = 0.0) {
  const int nr = static_cast<int>(p.rows()), nc = static_cast<int>(p.cols());
  std::vector<int> col_best(nc, 0);
  for (int j = 0; j < nc; ++j) {
    for (int i = 1; i < nr; ++i)
      if (p(i, j) > p(col_best[j], j)) col_best[j] = i;
  }
  CorrespondenceSet matches;
  for (int i = 0; i < nr; ++i) {
    int jbest = 0;
    for (int j = 1; j < nc; ++j)
      if (p(i, j) > p(i, jbest)) jbest = j;
    const double conf = static_cast<double>(p(i, jbest));
    if (col_best[jbest] == i && conf >= confidence_floor)
      matches.push_back({i, jbest, conf});
  }
  return matches;
}

// Same matches as partial_assignment + extract_matches (product mode) without
// materializing P: log P_ij = 2 S_ij - lse_row_i - lse_col_j + log terms, so
// the arg-maxes only need per-row/per-column log-sum-exp vectors.
CorrespondenceSet extract_matches_fast(const Eigen::MatrixXf& s,
                                       const Eigen::VectorXf& sigma_r,
                                       const Eigen::VectorXf& sigma_c,
                                       double confidence_floor = 0.0);

struct GroundTruthMatches {
  std::vector<std::pair<int, int>> pairs;  // (reflectance i, nearest camera j)
  Eigen::VectorXd sigma_r_gt;
  Eigen::VectorXd sigma_c_gt;
};

// Lifts each reflectance edge through the map, projects it with the
// ground-truth transform and pairs it with the nearest camera edge within
// epsilon pixels. Unoccupied pixels and points behind the camera are
// unmatchable.
GroundTruthMatches gt_correspondences(const ProjectionMap& map, const LidarScan& scan,
                                      const EdgeSet& edges_r, const EdgeSet& edges_c,
                                      const RigidTransform& gt, const Mat3& intrinsics,
                                      double epsilon);

struct LossValues {
  double l_sigma1 = 0.0;
  double l_sigma2 = 0.0;
  double l_p = 0.0;
  double total = 0.0;
  bool lp_empty = false;  // no ground-truth pairs; L_P contributed 0
};

LossValues losses(const Eigen::MatrixXd& p, const Eigen::VectorXd& sigma_r,
                  const Eigen::VectorXd& sigma_c, const GroundTruthMatches& gt);

struct MatchGradients {
  MatchParams params;          // gradient w.r.t. every MatchParams entry
  Eigen::MatrixXd desc_r;      // gradient w.r.t. the input descriptors
  Eigen::MatrixXd desc_c;
  LossValues loss;
};

// Analytic gradients of the total loss; forward pass is recomputed internally.
MatchGradients loss_gradients(const Eigen::MatrixXd& desc_r,
                              const Eigen::MatrixXd& desc_c,
                              const MatchParams& params, const GroundTruthMatches& gt);

// Double-precision descriptor path for training: reduce, row-normalize, and
// the matching backward step through the normalization into the reduction map.
Eigen::MatrixXd reduce_and_normalize(const Eigen::MatrixXd& fused,
                                     const ReductionMap& reduction,
                                     Eigen::MatrixXd* pre_out = nullptr);
ReductionMap reduction_gradient(const Eigen::MatrixXd& fused, const Eigen::MatrixXd& pre,
                                const Eigen::MatrixXd& d_desc);

void save_match_params(const MatchParams& params, const std::string& prefix,
                       std::uint64_t seed = 0, const std::string& note = "");
MatchParams load_match_params(const std::string& prefix);

std::string correspondences_to_csv(const CorrespondenceSet& matches,
                                   const EdgeSet& edges_r, const EdgeSet& edges_c);

}  // namespace regforge
