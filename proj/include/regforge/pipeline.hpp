#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "regforge/data_io.hpp"
#include "regforge/descriptor.hpp"
#include "regforge/image_ops.hpp"
#include "regforge/matcher.hpp"
#include "regforge/metrics.hpp"
#include "regforge/pose.hpp"
#include "regforge/projection.hpp"
#include "regforge/synthetic.hpp"
#include "regforge/types.hpp"

namespace regforge {

struct PipelineConfig {
  int map_width = 1024;              // map height = scan ring count (64 x 1024)
  int image_height = 160;
  int image_width = 512;
  double wavelet_threshold = 50.0;
  WaveletMode wavelet_mode = WaveletMode::suppress_large;
  double sobel_threshold_camera = 80.0;
  double sobel_threshold_reflectance = 50.0;
  int n_edges = 3000;
  double epsilon = 2.0;      // ground-truth match radius, pixels
  double epsilon_e = 6.0;    // RANSAC reprojection threshold, pixels
  MapKind map_kind = MapKind::reflectance;
  CombineMode combine = CombineMode::product;
  double confidence_floor = 0.0;
  double max_depth = 80.0;   // depth-map rasterization range
  EulerConvention euler = EulerConvention::xyz;
  std::uint64_t seed = 0;
};

PipelineConfig pipeline_config_from_json(const std::string& json_text);
std::string pipeline_config_to_json(const PipelineConfig& config);

struct SceneInput {
  LidarScan scan_for_map;   // rotation-stage perturbation applied
  LidarScan scan_for_lift;  // + translation stage; source of lifted 3D points
  CameraFrame frame;
  // Nominal extrinsic, when known; constrains RANSAC to the decalibration
  // family (yaw + in-plane translation) around it.
  std::optional<RigidTransform> pose_prior;
};

struct PipelineArtifacts {
  ProjectionMap map;
  GrayImage gray_r, gray_c;
  EdgeSet edges_r, edges_c;
  DescriptorSet desc_r, desc_c;
  Eigen::VectorXf sigma_r, sigma_c;
  CorrespondenceSet matches;
  PoseEstimate pose;
  int dropped_matches = 0;
  StageTimes times;
};

// project -> wavelet+edges -> describe -> match -> pose, with per-stage timing.
PipelineArtifacts run_pipeline(const SceneInput& input, const MatchParams& params,
                               const ReductionMap& reduction,
                               const PipelineConfig& config);

// Applies the two-stage perturbation protocol to a synthetic scene and runs
// the pipeline; the result compares against extrinsic ∘ perturbation^-1.
RegistrationResult run_synthetic_scene(std::uint64_t seed, const SceneConfig& scene_cfg,
                                       const MatchParams& params,
                                       const ReductionMap& reduction,
                                       const PipelineConfig& config,
                                       PipelineArtifacts* artifacts_out = nullptr);

RigidTransform synthetic_ground_truth(const RigidTransform& extrinsic,
                                      const Perturbation& p);

enum class SceneKind { wall_grid, stripe_wall };

// Optional down-scaling of the synthetic scenes (desk-scale runs).
struct SceneScale {
  int rings = 64;
  int points_per_ring = 1024;
  int image_height = 80;
  int image_width = 160;
};

SceneConfig make_scene(SceneKind kind, std::uint64_t seed, const SceneScale& scale);

// Per-scene evaluation over seeds [seed_base, seed_base + count).
std::vector<RegistrationResult> evaluate_synthetic(
    std::uint64_t seed_base, int count, SceneKind kind, const SceneScale& scale,
    const MatchParams& params, const ReductionMap& reduction,
    const PipelineConfig& config);

}  // namespace regforge
