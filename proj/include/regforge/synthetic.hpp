#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regforge/types.hpp"

namespace regforge {

// Ray-castable primitives. Rectangles carry a reflectance pattern over their
// (u, v) parameterization; cylinders are uniform and act as distant background
// so every sweep direction returns a point.
struct RectPattern {
  int cells_u = 1;
  int cells_v = 1;
  std::vector<double> values;  // cells_u*cells_v, row-major in v; empty = seeded fill
};

struct RectPrimitive {
  Vec3 origin = Vec3::Zero();
  Vec3 edge_u = Vec3::UnitY();
  Vec3 edge_v = Vec3::UnitZ();
  RectPattern pattern;
};

struct CylinderPrimitive {
  double radius = 60.0;
  double z_min = -30.0;
  double z_max = 60.0;
  // Mid-range so wall/background steps are mostly gentle: against wall cells
  // near 0.5 the border produces no edge at all, and against most others it
  // stays below the wavelet threshold, keeping map and camera borders alike.
  double reflectance = 0.5;
};

struct SceneConfig {
  int rings = 64;
  int points_per_ring = 1024;
  double elev_min_deg = -20.0;
  double elev_max_deg = 10.0;
  std::vector<RectPrimitive> rects;
  std::optional<CylinderPrimitive> background;
  Mat3 intrinsics = Mat3::Identity();
  RigidTransform lidar_to_camera;
  int image_height = 160;
  int image_width = 512;
};

struct SyntheticScene {
  LidarScan scan;
  CameraFrame frame;
  RigidTransform lidar_to_camera;  // exact ground-truth extrinsic
};

// Deterministic per (seed, config). Unfilled rect patterns are populated from
// the seed; scan points are emitted in sweep order (ring-major, azimuth
// increasing) so ring inference on a saved scan reproduces the generator's rings.
SyntheticScene generate_synthetic_scene(std::uint64_t seed, const SceneConfig& config);

// Front wall with a seeded reflectance grid plus a background cylinder; the
// wall spans most of the camera frame. Geometry is jittered per seed.
SceneConfig make_wall_scene_config(std::uint64_t seed);

// Flat wall whose only texture is reflectance stripes: geometry carries no
// depth edges, so a depth-map pipeline has nothing to match on.
SceneConfig make_stripe_wall_config(std::uint64_t seed);

SceneConfig scene_config_from_json(const std::string& json_text);
std::string scene_config_to_json(const SceneConfig& config);

}  // namespace regforge
