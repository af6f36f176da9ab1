#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "regforge/descriptor.hpp"
#include "regforge/pipeline.hpp"

using namespace regforge;

namespace {

GrayImage ramp_image(int rows, int cols) {
  GrayImage img;
  img.origin = GrayOrigin::camera_red;
  img.values.resize(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      img.values(r, c) = std::fmod(3.0 * r + 5.0 * c + 0.25 * r * c, 256.0);
  return img;
}

EdgeSet edges_at(std::initializer_list<std::pair<int, int>> pixels) {
  EdgeSet edges;
  const int n = static_cast<int>(pixels.size());
  edges.pixels.resize(n, 2);
  edges.scores.resize(n);
  edges.target_count = n;
  edges.real_count = n;
  int i = 0;
  for (const auto& [r, c] : pixels) {
    edges.pixels(i, 0) = r;
    edges.pixels(i, 1) = c;
    edges.scores(i) = static_cast<double>(n - i);
    ++i;
  }
  return edges;
}

}  // namespace

TEST_CASE("field shapes: 1/4-scale grid, C_l=64 local, C_g=512 global (L1)") {
  const GrayImage img = ramp_image(30, 43);
  const FeatureField field = reference_descriptor(img);
  CHECK(field.grid_rows == 8);   // ceil(30/4)
  CHECK(field.grid_cols == 11);  // ceil(43/4)
  CHECK(field.local.rows() == 8 * 11);
  CHECK(field.local.cols() == kLocalChannels);
  CHECK(field.global.size() == kGlobalChannels);
  CHECK(field.global.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(field.global.minCoeff() >= 0.0);
}

TEST_CASE("default reduction has orthonormal rows and is reproducible") {
  const ReductionMap a = make_default_reduction();
  const ReductionMap b = make_default_reduction();
  CHECK(a.rows() == kDescriptorDim);
  CHECK(a.cols() == kFusedDim);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::MatrixXd gram = a * a.transpose();
  CHECK((gram - Eigen::MatrixXd::Identity(kDescriptorDim, kDescriptorDim))
            .cwiseAbs()
            .maxCoeff() <= 1e-9);
}

TEST_CASE("descriptor rows are unit norm and N matches the edge set") {
  const GrayImage img = ramp_image(64, 96);
  const FeatureField field = reference_descriptor(img);
  const EdgeSet edges = sobel_edges(img, 10.0, 128);
  const DescriptorSet set = fuse_and_sample(field, field.global, edges,
                                            make_default_reduction(),
                                            DescriptorSource::camera);
  CHECK(set.size() == edges.size());
  CHECK(set.vectors.cols() == kDescriptorDim);
  for (int i = 0; i < set.size(); ++i)
    CHECK(set.vectors.row(i).norm() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("zero global + identity-block reduction = normalized local sample") {
  const GrayImage img = ramp_image(40, 40);
  const FeatureField field = reference_descriptor(img);
  const EdgeSet edges = edges_at({{8, 12}, {16, 24}});
  const DescriptorSet set =
      fuse_and_sample(field, Eigen::VectorXd::Zero(kGlobalChannels), edges,
                      make_identity_block_reduction(), DescriptorSource::camera);
  // Both pixels sit on the 1/4-scale lattice, so bilinear sampling returns the
  // cell row exactly.
  const Eigen::VectorXd c0 = field.cell(2, 3).transpose();
  const Eigen::VectorXd c1 = field.cell(4, 6).transpose();
  CHECK((set.vectors.row(0).transpose().cast<double>() - c0 / c0.norm())
            .cwiseAbs()
            .maxCoeff() <= 1e-6);
  CHECK((set.vectors.row(1).transpose().cast<double>() - c1 / c1.norm())
            .cwiseAbs()
            .maxCoeff() <= 1e-6);
}

TEST_CASE("bilinear sampling is linear along grid axes") {
  // Hand-built field whose cells form a linear ramp; interpolation at any
  // fractional coordinate must reproduce the ramp value exactly.
  FeatureField field;
  field.grid_rows = 5;
  field.grid_cols = 7;
  field.local.resize(5 * 7, kLocalChannels);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 7; ++c)
      for (int k = 0; k < kLocalChannels; ++k)
        field.local(r * 7 + c, k) = 2.0 * r + 3.0 * c + 0.1 * k;
  field.global = Eigen::VectorXd::Zero(kGlobalChannels);

  // Pixel (6, 9) -> field coordinate (1.5, 2.25).
  const EdgeSet edges = edges_at({{6, 9}});
  Eigen::MatrixXd fused;
  fuse_and_sample(field, Eigen::VectorXd::Zero(kGlobalChannels), edges,
                  make_identity_block_reduction(), DescriptorSource::camera, &fused);
  for (int k = 0; k < kLocalChannels; ++k) {
    const double expected = 2.0 * 1.5 + 3.0 * 2.25 + 0.1 * k;
    CHECK(fused(0, k) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("cross-wiring: each branch carries the OTHER branch's global vector") {
  const GrayImage img = ramp_image(32, 32);
  const FeatureField field = reference_descriptor(img);
  Eigen::VectorXd sentinel(kGlobalChannels);
  for (int i = 0; i < kGlobalChannels; ++i) sentinel(i) = 1e-3 * (i + 1);
  const EdgeSet edges = edges_at({{4, 4}, {12, 20}});
  Eigen::MatrixXd fused;
  fuse_and_sample(field, sentinel, edges, make_default_reduction(),
                  DescriptorSource::reflectance, &fused);
  REQUIRE(fused.cols() == kFusedDim);
  for (int i = 0; i < 2; ++i)
    CHECK((fused.row(i).tail(kGlobalChannels).transpose() - sentinel)
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("descriptor set save/load round-trip") {
  const GrayImage img = ramp_image(32, 48);
  const FeatureField field = reference_descriptor(img);
  const EdgeSet edges = sobel_edges(img, 10.0, 32);
  const DescriptorSet set = fuse_and_sample(field, field.global, edges,
                                            make_default_reduction(),
                                            DescriptorSource::camera);
  const std::string prefix =
      (std::filesystem::temp_directory_path() / "regforge_descr").string();
  save_descriptor_set(set, prefix);
  const DescriptorSet loaded = load_descriptor_set(prefix);
  CHECK(loaded.source == DescriptorSource::camera);
  REQUIRE(loaded.vectors.rows() == set.vectors.rows());
  CHECK((loaded.vectors - set.vectors).cwiseAbs().maxCoeff() == 0.0f);
  std::filesystem::remove(prefix + ".bin");
  std::filesystem::remove(prefix + ".json");
}

TEST_CASE("distance sanity: true match in top-5 for >= 70% of gt pairs") {
  // Single textured wall with independently drawn full-range cell
  // reflectances; measured rate is ~86% over these 20 seeds.
  PipelineConfig cfg;
  const ReductionMap reduction = make_default_reduction();
  long hit = 0, total = 0;
  for (std::uint64_t seed = 300; seed < 320; ++seed) {
    SceneConfig sc = make_scene(SceneKind::stripe_wall, seed, SceneScale{});
    std::mt19937_64 rng(seed * 6271 + 5);
    std::uniform_real_distribution<double> uni(0.05, 0.95);
    for (RectPrimitive& rect : sc.rects) {
      rect.pattern.values.resize(
          static_cast<std::size_t>(rect.pattern.cells_u) * rect.pattern.cells_v);
      for (double& v : rect.pattern.values) v = uni(rng);
    }
    const SyntheticScene scene = generate_synthetic_scene(seed, sc);
    const Perturbation p = sample_perturbation(seed ^ 0xabcdef12ULL);
    const RigidTransform gt = synthetic_ground_truth(scene.lidar_to_camera, p);
    const LidarScan scan_map =
        apply_perturbation(scene.scan, p, PerturbationStage::rotation_only);
    const LidarScan scan_lift =
        apply_perturbation(scan_map, p, PerturbationStage::translation_only);
    const ProjectionMap map = project(scan_map, cfg.map_width, cfg.map_kind);
    const GrayImage gray_r = wavelet_filter(gray_from_map(map, cfg.max_depth),
                                            cfg.wavelet_threshold, cfg.wavelet_mode);
    const GrayImage gray_c = red_channel(scene.frame);
    const EdgeSet edges_r =
        sobel_edges(gray_r, cfg.sobel_threshold_reflectance, cfg.n_edges);
    const EdgeSet edges_c = sobel_edges(gray_c, cfg.sobel_threshold_camera, cfg.n_edges);
    const FeatureField field_r = reference_descriptor(gray_r);
    const FeatureField field_c = reference_descriptor(gray_c);
    const DescriptorSet desc_r = fuse_and_sample(field_r, field_c.global, edges_r,
                                                 reduction, DescriptorSource::reflectance);
    const DescriptorSet desc_c = fuse_and_sample(field_c, field_r.global, edges_c,
                                                 reduction, DescriptorSource::camera);
    const GroundTruthMatches gt_matches =
        gt_correspondences(map, scan_lift, edges_r, edges_c, gt,
                           scene.frame.intrinsics, cfg.epsilon);
    const Eigen::MatrixXf similarity = desc_r.vectors.topRows(edges_r.real_count) *
                                       desc_c.vectors.topRows(edges_c.real_count)
                                           .transpose();
    for (const auto& [i, j] : gt_matches.pairs) {
      if (i >= edges_r.real_count || j >= edges_c.real_count) continue;
      int rank = 0;
      for (int k = 0; k < edges_c.real_count; ++k)
        if (similarity(i, k) > similarity(i, j)) ++rank;
      ++total;
      if (rank < 5) ++hit;
    }
  }
  REQUIRE(total > 200);
  CHECK(100.0 * static_cast<double>(hit) / static_cast<double>(total) >= 70.0);
}
