#include "regforge/train.hpp"

#include <cmath>

namespace regforge {
namespace {

struct AdamSlot {
  Eigen::MatrixXd m, v;
  void init(Eigen::Index rows, Eigen::Index cols) {
    m = Eigen::MatrixXd::Zero(rows, cols);
    v = Eigen::MatrixXd::Zero(rows, cols);
  }
};

// beta1=0.9, beta2=0.999, eps=1e-8
void adam_step(Eigen::Ref<Eigen::MatrixXd> param, const Eigen::MatrixXd& grad,
               AdamSlot& slot, double lr, int t) {
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  slot.m = b1 * slot.m + (1.0 - b1) * grad;
  slot.v = b2 * slot.v + (1.0 - b2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  param -= (lr / c1) * slot.m.cwiseQuotient(
                           ((slot.v / c2).cwiseSqrt().array() + eps).matrix());
}

}  // namespace

TrainingInstance make_training_instance(std::uint64_t seed, const SceneConfig& scene_cfg,
                                        const ReductionMap& reduction,
                                        const PipelineConfig& config) {
  const SyntheticScene scene = generate_synthetic_scene(seed, scene_cfg);
  const Perturbation p = sample_perturbation(seed ^ 0xabcdef12ULL);
  const RigidTransform gt_transform = synthetic_ground_truth(scene.lidar_to_camera, p);

  const LidarScan scan_rot =
      apply_perturbation(scene.scan, p, PerturbationStage::rotation_only);
  const LidarScan scan_pert =
      apply_perturbation(scan_rot, p, PerturbationStage::translation_only);

  const ProjectionMap map = project(scan_rot, config.map_width, config.map_kind);
  const GrayImage gray_r = wavelet_filter(gray_from_map(map, config.max_depth),
                                          config.wavelet_threshold, config.wavelet_mode);
  const GrayImage gray_c = red_channel(
      scene.frame, TargetSize{scene.frame.image.height, scene.frame.image.width});
  const EdgeSet edges_r =
      sobel_edges(gray_r, config.sobel_threshold_reflectance, config.n_edges);
  const EdgeSet edges_c = sobel_edges(gray_c, config.sobel_threshold_camera, config.n_edges);

  const FeatureField field_r = reference_descriptor(gray_r);
  const FeatureField field_c = reference_descriptor(gray_c);

  TrainingInstance inst;
  Eigen::MatrixXd fused_r, fused_c;
  fuse_and_sample(field_r, field_c.global, edges_r, reduction,
                  DescriptorSource::reflectance, &fused_r);
  fuse_and_sample(field_c, field_r.global, edges_c, reduction, DescriptorSource::camera,
                  &fused_c);
  // Keep only the real detections: the padding rows duplicate earlier edges,
  // which both bloats the cached instances and distorts the softmax losses.
  inst.fused_r = fused_r.topRows(edges_r.real_count);
  inst.fused_c = fused_c.topRows(edges_c.real_count);
  inst.desc_r = reduce_and_normalize(inst.fused_r, reduction);
  inst.desc_c = reduce_and_normalize(inst.fused_c, reduction);
  inst.gt = gt_correspondences(map, scan_pert, edges_r, edges_c, gt_transform,
                               scene.frame.intrinsics, config.epsilon);
  std::erase_if(inst.gt.pairs, [&](const std::pair<int, int>& p) {
    return p.first >= edges_r.real_count || p.second >= edges_c.real_count;
  });
  inst.gt.sigma_r_gt.conservativeResize(edges_r.real_count);
  inst.gt.sigma_c_gt.conservativeResize(edges_c.real_count);
  return inst;
}

TrainReport toy_train_on_instances(std::vector<TrainingInstance>& instances,
                                   const TrainOptions& options,
                                   const ReductionMap& reduction) {
  TrainReport report;
  report.reduction = reduction;
  report.params = MatchParams::identity(kDescriptorDim);
  report.params.lin_r *= options.init_scale;
  report.params.lin_c *= options.init_scale;

  MatchParams& p = report.params;
  AdamSlot s_lin_r, s_lin_c, s_bias_r, s_bias_c, s_w_r, s_w_c, s_b_r, s_b_c, s_red;
  s_lin_r.init(kDescriptorDim, kDescriptorDim);
  s_lin_c.init(kDescriptorDim, kDescriptorDim);
  s_bias_r.init(kDescriptorDim, 1);
  s_bias_c.init(kDescriptorDim, 1);
  s_w_r.init(kDescriptorDim, 1);
  s_w_c.init(kDescriptorDim, 1);
  s_b_r.init(1, 1);
  s_b_c.init(1, 1);
  if (options.train_reduction) s_red.init(kDescriptorDim, kFusedDim);

  int step = 0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < instances.size();
         start += static_cast<std::size_t>(options.batch_size)) {
      const std::size_t end =
          std::min(instances.size(), start + static_cast<std::size_t>(options.batch_size));
      const double inv_b = 1.0 / static_cast<double>(end - start);

      MatchParams g = MatchParams::identity(kDescriptorDim);
      g.lin_r.setZero();
      g.lin_c.setZero();
      ReductionMap g_red;
      if (options.train_reduction)
        g_red = Eigen::MatrixXd::Zero(kDescriptorDim, kFusedDim);

      for (std::size_t i = start; i < end; ++i) {
        TrainingInstance& inst = instances[i];
        if (options.train_reduction) {
          inst.desc_r = reduce_and_normalize(inst.fused_r, report.reduction);
          inst.desc_c = reduce_and_normalize(inst.fused_c, report.reduction);
        }
        const MatchGradients grads = loss_gradients(inst.desc_r, inst.desc_c, p, inst.gt);
        epoch_loss += grads.loss.total;
        g.lin_r += inv_b * grads.params.lin_r;
        g.lin_c += inv_b * grads.params.lin_c;
        g.bias_r += inv_b * grads.params.bias_r;
        g.bias_c += inv_b * grads.params.bias_c;
        g.score_w_r += inv_b * grads.params.score_w_r;
        g.score_w_c += inv_b * grads.params.score_w_c;
        g.score_b_r += inv_b * grads.params.score_b_r;
        g.score_b_c += inv_b * grads.params.score_b_c;
        if (options.train_reduction) {
          Eigen::MatrixXd pre_r, pre_c;
          reduce_and_normalize(inst.fused_r, report.reduction, &pre_r);
          reduce_and_normalize(inst.fused_c, report.reduction, &pre_c);
          g_red += inv_b * reduction_gradient(inst.fused_r, pre_r, grads.desc_r);
          g_red += inv_b * reduction_gradient(inst.fused_c, pre_c, grads.desc_c);
        }
      }

      ++step;
      adam_step(p.lin_r, g.lin_r, s_lin_r, options.learning_rate, step);
      adam_step(p.lin_c, g.lin_c, s_lin_c, options.learning_rate, step);
      adam_step(p.bias_r, g.bias_r, s_bias_r, options.learning_rate, step);
      adam_step(p.bias_c, g.bias_c, s_bias_c, options.learning_rate, step);
      adam_step(p.score_w_r, g.score_w_r, s_w_r, options.learning_rate, step);
      adam_step(p.score_w_c, g.score_w_c, s_w_c, options.learning_rate, step);
      Eigen::MatrixXd b_r(1, 1), b_c(1, 1), gb_r(1, 1), gb_c(1, 1);
      b_r(0, 0) = p.score_b_r;
      b_c(0, 0) = p.score_b_c;
      gb_r(0, 0) = g.score_b_r;
      gb_c(0, 0) = g.score_b_c;
      adam_step(b_r, gb_r, s_b_r, options.learning_rate, step);
      adam_step(b_c, gb_c, s_b_c, options.learning_rate, step);
      p.score_b_r = b_r(0, 0);
      p.score_b_c = b_c(0, 0);
      if (options.train_reduction)
        adam_step(report.reduction, g_red, s_red, options.learning_rate, step);
    }
    epoch_loss /= static_cast<double>(instances.size());
    report.epoch_loss.push_back(epoch_loss);
    if (epoch_loss > 10.0 * report.epoch_loss.front() || !std::isfinite(epoch_loss))
      throw Error(ErrorCode::training_diverged, "training loss diverged");
  }
  return report;
}

TrainReport toy_train(const TrainOptions& options, const PipelineConfig& config) {
  const ReductionMap reduction = make_default_reduction();
  std::vector<TrainingInstance> instances;
  instances.reserve(options.num_scenes);
  for (int i = 0; i < options.num_scenes; ++i) {
    const std::uint64_t seed = options.seed + i;
    instances.push_back(make_training_instance(
        seed, make_scene(options.scene_kind, seed, options.scale), reduction, config));
  }
  return toy_train_on_instances(instances, options, reduction);
}

}  // namespace regforge
