#pragma once

#include <cstdint>
#include <vector>

#include "regforge/pipeline.hpp"

namespace regforge {

struct TrainOptions {
  int epochs = 30;
  double learning_rate = 0.001;
  int batch_size = 16;
  int num_scenes = 200;
  std::uint64_t seed = 1;
  // Initial lin_r/lin_c = init_scale * I. Descriptors are unit-norm, so raw
  // cosine scores leave the dual softmax nearly uniform; a larger initial
  // temperature starts training in the refinement regime instead of letting
  // the first epochs restructure the score map. Scaling does not change the
  // untrained matches (softmax order is monotone in S).
  double init_scale = 16.0;
  bool train_reduction = false;
  SceneKind scene_kind = SceneKind::wall_grid;
  SceneScale scale;
};

// Per-scene cached training instance: double-precision descriptors plus the
// ground-truth correspondences under the scene's exact transform.
struct TrainingInstance {
  Eigen::MatrixXd fused_r, fused_c;  // N x 576, pre-reduction
  Eigen::MatrixXd desc_r, desc_c;
  GroundTruthMatches gt;
};

struct TrainReport {
  MatchParams params;
  ReductionMap reduction;
  std::vector<double> epoch_loss;
};

TrainingInstance make_training_instance(std::uint64_t seed, const SceneConfig& scene_cfg,
                                        const ReductionMap& reduction,
                                        const PipelineConfig& config);

// Adam on the matching layer (optionally also the descriptor reduction) over a
// synthetic curriculum. Deterministic per seed.
TrainReport toy_train(const TrainOptions& options, const PipelineConfig& config);

TrainReport toy_train_on_instances(std::vector<TrainingInstance>& instances,
                                   const TrainOptions& options,
                                   const ReductionMap& reduction);

}  // namespace regforge
