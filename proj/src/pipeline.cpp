#include "regforge/pipeline.hpp"

#include <chrono>

#include <json.hpp>

namespace regforge {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

PipelineConfig pipeline_config_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::format, std::string("config parse error: ") + e.what());
  }
  PipelineConfig c;
  c.map_width = j.value("map_width", c.map_width);
  c.image_height = j.value("image_height", c.image_height);
  c.image_width = j.value("image_width", c.image_width);
  c.wavelet_threshold = j.value("wavelet_threshold", c.wavelet_threshold);
  c.sobel_threshold_camera = j.value("sobel_threshold_camera", c.sobel_threshold_camera);
  c.sobel_threshold_reflectance =
      j.value("sobel_threshold_reflectance", c.sobel_threshold_reflectance);
  c.n_edges = j.value("n_edges", c.n_edges);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.epsilon_e = j.value("epsilon_e", c.epsilon_e);
  c.confidence_floor = j.value("confidence_floor", c.confidence_floor);
  c.max_depth = j.value("max_depth", c.max_depth);
  c.seed = j.value("seed", c.seed);
  if (j.value("map_kind", "reflectance") == std::string("depth"))
    c.map_kind = MapKind::depth;
  if (j.value("wavelet_mode", "suppress-large") == std::string("suppress-small"))
    c.wavelet_mode = WaveletMode::suppress_small;
  if (j.value("combine", "product") == std::string("mean")) c.combine = CombineMode::mean;
  if (j.value("euler", "xyz") == std::string("zyx")) c.euler = EulerConvention::zyx;
  return c;
}

std::string pipeline_config_to_json(const PipelineConfig& c) {
  nlohmann::json j;
  j["map_width"] = c.map_width;
  j["image_height"] = c.image_height;
  j["image_width"] = c.image_width;
  j["wavelet_threshold"] = c.wavelet_threshold;
  j["wavelet_mode"] = c.wavelet_mode == WaveletMode::suppress_large ? "suppress-large"
                                                                    : "suppress-small";
  j["sobel_threshold_camera"] = c.sobel_threshold_camera;
  j["sobel_threshold_reflectance"] = c.sobel_threshold_reflectance;
  j["n_edges"] = c.n_edges;
  j["epsilon"] = c.epsilon;
  j["epsilon_e"] = c.epsilon_e;
  j["map_kind"] = c.map_kind == MapKind::reflectance ? "reflectance" : "depth";
  j["combine"] = c.combine == CombineMode::product ? "product" : "mean";
  j["confidence_floor"] = c.confidence_floor;
  j["max_depth"] = c.max_depth;
  j["euler"] = c.euler == EulerConvention::xyz ? "xyz" : "zyx";
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

PipelineArtifacts run_pipeline(const SceneInput& input, const MatchParams& params,
                               const ReductionMap& reduction,
                               const PipelineConfig& config) {
  PipelineArtifacts art;

  auto t0 = Clock::now();
  art.map = project(input.scan_for_map, config.map_width, config.map_kind);
  art.times.project = seconds_since(t0);

  t0 = Clock::now();
  GrayImage map_gray = gray_from_map(art.map, config.max_depth);
  art.gray_r = wavelet_filter(map_gray, config.wavelet_threshold, config.wavelet_mode);
  art.gray_c = red_channel(input.frame, TargetSize{config.image_height, config.image_width});
  art.edges_r = sobel_edges(art.gray_r, config.sobel_threshold_reflectance, config.n_edges);
  art.edges_c = sobel_edges(art.gray_c, config.sobel_threshold_camera, config.n_edges);
  art.times.edges = seconds_since(t0);

  t0 = Clock::now();
  const FeatureField field_r = reference_descriptor(art.gray_r);
  const FeatureField field_c = reference_descriptor(art.gray_c);
  // cross-wired fusion: each branch consumes the other branch's global vector
  art.desc_r = fuse_and_sample(field_r, field_c.global, art.edges_r, reduction,
                               DescriptorSource::reflectance);
  art.desc_c = fuse_and_sample(field_c, field_r.global, art.edges_c, reduction,
                               DescriptorSource::camera);
  art.times.describe = seconds_since(t0);

  t0 = Clock::now();
  const MatchParamsT<float> fparams = params.cast<float>();
  // Match on real detections only: the duplicated padding rows would otherwise
  // split softmax mass between identical descriptors and break mutual-max.
  const Eigen::MatrixXf desc_r = art.desc_r.vectors.topRows(art.edges_r.real_count);
  const Eigen::MatrixXf desc_c = art.desc_c.vectors.topRows(art.edges_c.real_count);
  const Eigen::MatrixXf s = score_matrix<float>(desc_r, desc_c, fparams);
  art.sigma_r = matchability<float>(desc_r, fparams.score_w_r, fparams.score_b_r);
  art.sigma_c = matchability<float>(desc_c, fparams.score_w_c, fparams.score_b_c);
  if (config.combine == CombineMode::product) {
    art.matches = extract_matches_fast(s, art.sigma_r, art.sigma_c, config.confidence_floor);
  } else {
    const Eigen::MatrixXf p = partial_assignment<float>(s, art.sigma_r, art.sigma_c,
                                                        config.combine);
    art.matches = extract_matches<float>(p, config.confidence_floor);
  }
  art.times.match = seconds_since(t0);

  t0 = Clock::now();
  const std::vector<Correspondence3d2d> corrs =
      lift_correspondences(art.matches, art.edges_r, art.edges_c, art.map,
                           input.scan_for_lift, &art.dropped_matches);
  RansacOptions opts;
  opts.epsilon_e = config.epsilon_e;
  opts.seed = config.seed;
  opts.prior = input.pose_prior;
  art.pose = ransac_epnp(corrs, input.frame.intrinsics, opts);
  art.times.pose = seconds_since(t0);
  return art;
}

RigidTransform synthetic_ground_truth(const RigidTransform& extrinsic,
                                      const Perturbation& p) {
  return extrinsic.compose(p.as_transform().inverse());
}

RegistrationResult run_synthetic_scene(std::uint64_t seed, const SceneConfig& scene_cfg,
                                       const MatchParams& params,
                                       const ReductionMap& reduction,
                                       const PipelineConfig& config,
                                       PipelineArtifacts* artifacts_out) {
  const SyntheticScene scene = generate_synthetic_scene(seed, scene_cfg);
  const Perturbation p = sample_perturbation(seed ^ 0xabcdef12ULL);
  const RigidTransform gt = synthetic_ground_truth(scene.lidar_to_camera, p);

  SceneInput input;
  input.scan_for_map = apply_perturbation(scene.scan, p, PerturbationStage::rotation_only);
  input.scan_for_lift =
      apply_perturbation(input.scan_for_map, p, PerturbationStage::translation_only);
  input.frame = scene.frame;
  input.pose_prior = scene.lidar_to_camera;

  PipelineConfig cfg = config;
  cfg.image_height = scene.frame.image.height;
  cfg.image_width = scene.frame.image.width;
  cfg.seed = config.seed ^ seed;

  try {
    PipelineArtifacts art = run_pipeline(input, params, reduction, cfg);
    RegistrationResult res = make_result(gt, art.pose.transform, art.times, config.euler);
    if (artifacts_out) *artifacts_out = std::move(art);
    return res;
  } catch (const Error&) {
    // registration did not produce a pose; score the identity estimate
    RegistrationResult res = make_result(gt, RigidTransform{}, StageTimes{}, config.euler);
    res.failed = true;
    res.success = false;
    res.bad = true;
    return res;
  }
}

SceneConfig make_scene(SceneKind kind, std::uint64_t seed, const SceneScale& scale) {
  SceneConfig cfg = kind == SceneKind::wall_grid ? make_wall_scene_config(seed)
                                                 : make_stripe_wall_config(seed);
  cfg.rings = scale.rings;
  cfg.points_per_ring = scale.points_per_ring;
  if (scale.image_width != cfg.image_width || scale.image_height != cfg.image_height) {
    cfg.intrinsics(0, 0) *= static_cast<double>(scale.image_width) / cfg.image_width;
    cfg.intrinsics(0, 2) *= static_cast<double>(scale.image_width) / cfg.image_width;
    cfg.intrinsics(1, 1) *= static_cast<double>(scale.image_height) / cfg.image_height;
    cfg.intrinsics(1, 2) *= static_cast<double>(scale.image_height) / cfg.image_height;
    cfg.image_width = scale.image_width;
    cfg.image_height = scale.image_height;
  }
  return cfg;
}

std::vector<RegistrationResult> evaluate_synthetic(
    std::uint64_t seed_base, int count, SceneKind kind, const SceneScale& scale,
    const MatchParams& params, const ReductionMap& reduction,
    const PipelineConfig& config) {
  std::vector<RegistrationResult> results;
  results.reserve(count);
  for (int i = 0; i < count; ++i)
    results.push_back(
        run_synthetic_scene(seed_base + i, make_scene(kind, seed_base + i, scale),
                            params, reduction, config));
  return results;
}

}  // namespace regforge
