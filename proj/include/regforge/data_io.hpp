#pragma once

#include <string>
#include <vector>

#include "regforge/types.hpp"

namespace regforge {

enum class RingMode {
  azimuth_wrap,  // count backward azimuth wraps in scan order
  theta_bins,    // bin by elevation angle; fallback for shuffled clouds
};

enum class PerturbationStage {
  rotation_only,     // applied before map generation
  translation_only,  // applied after map generation
};

// KITTI velodyne binary: consecutive little-endian float32 (x, y, z, reflectance).
LidarScan load_kitti_scan(const std::string& path, int num_rings = 64,
                          RingMode ring_mode = RingMode::azimuth_wrap);
void save_kitti_scan(const LidarScan& scan, const std::string& path);

// Reconstructs laser ring indices for points in original sensor scan order:
// a new ring starts whenever the azimuth jumps backward by more than pi.
std::vector<int> infer_rings(const std::vector<LidarPoint>& points, int num_rings);
std::vector<int> infer_rings_theta_bins(const std::vector<LidarPoint>& points, int num_rings);

LidarScan apply_perturbation(const LidarScan& scan, const Perturbation& p,
                             PerturbationStage stage);

// Uniform yaw on [-pi, pi), dx/dy uniform on [-10, 10] m.
Perturbation sample_perturbation(std::uint64_t seed);

struct KittiCalibration {
  Mat3 intrinsics = Mat3::Identity();       // left 3x3 block of P2
  RigidTransform velo_to_cam;               // Tr row
};

// Parses a KITTI odometry calib.txt ("KEY: 12 floats" per line).
KittiCalibration load_kitti_calibration(const std::string& path);

}  // namespace regforge
