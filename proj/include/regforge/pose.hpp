#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "regforge/matcher.hpp"
#include "regforge/types.hpp"

namespace regforge {

struct Correspondence3d2d {
  Vec3 world;            // lidar frame, post-perturbation
  double u = 0.0;        // pixel column
  double v = 0.0;        // pixel row
};

struct PoseEstimate {
  RigidTransform transform;
  std::vector<int> inliers;
  double reprojection_rmse = 0.0;  // over inliers, pixels
  int iterations_used = 0;
};

// 2D-2D matches to 3D-2D pairs through the projection matrix. Matches whose
// reflectance pixel is unoccupied are dropped; duplicates (from edge padding)
// are collapsed. `dropped` counts both.
std::vector<Correspondence3d2d> lift_correspondences(
    const CorrespondenceSet& matches, const EdgeSet& edges_r, const EdgeSet& edges_c,
    const ProjectionMap& map, const LidarScan& scan, int* dropped = nullptr);

// Standard EPnP: 4 control points (3 in the planar case), beta cases N=1..3
// with Gauss-Newton refinement, absolute orientation for R, t.
RigidTransform epnp(const std::vector<Correspondence3d2d>& corrs, const Mat3& intrinsics);

struct RansacOptions {
  double epsilon_e = 6.0;  // inlier reprojection threshold, pixels
  int max_iterations = 1000;
  double confidence = 0.999;
  std::uint64_t seed = 0;
  // Optional nominal extrinsic. The decalibration protocol perturbs the scan
  // with a yaw rotation and an in-plane translation only, so every admissible
  // pose is prior ∘ q with q a rotation about the lidar z axis plus an (x, y)
  // shift. Hypotheses outside that family (e.g. the mirrored solution of a
  // coplanar point set) are rejected before inlier counting.
  std::optional<RigidTransform> prior;
  double prior_rot_tol_rad = 0.10;  // residual after removing the yaw part
  double prior_tz_tol_m = 1.0;      // out-of-plane translation of q
};

PoseEstimate ransac_epnp(const std::vector<Correspondence3d2d>& corrs,
                         const Mat3& intrinsics, const RansacOptions& options = {});

double reprojection_error(const RigidTransform& t, const Mat3& intrinsics,
                          const Correspondence3d2d& corr);

std::string pose_to_json(const PoseEstimate& est);

}  // namespace regforge
