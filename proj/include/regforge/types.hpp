#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace regforge {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// One exit code per error class; the CLI maps these directly.
enum class ErrorCode : int {
  io = 3,
  format = 4,
  empty_input = 5,
  degenerate = 6,
  insufficient_correspondences = 7,
  registration_failed = 8,
  numeric = 9,
  contract = 10,
  training_diverged = 11,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }
  int exit_code() const { return static_cast<int>(code_); }

 private:
  ErrorCode code_;
};

struct LidarPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double reflectance = 0.0;  // normalized to [0, 1]
  int ring = 0;              // laser index in [0, num_rings)
};

struct LidarScan {
  std::vector<LidarPoint> points;
  int num_rings = 64;  // HDL-64E
};

// 8-bit interleaved RGB image.
struct Image8 {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> rgb;  // height*width*3, row-major

  std::uint8_t at(int row, int col, int ch) const {
    return rgb[static_cast<std::size_t>((row * width + col) * 3 + ch)];
  }
  std::uint8_t& at(int row, int col, int ch) {
    return rgb[static_cast<std::size_t>((row * width + col) * 3 + ch)];
  }
};

struct CameraFrame {
  Image8 image;
  Mat3 intrinsics = Mat3::Identity();
  int frame_id = 0;
};

struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  RigidTransform inverse() const {
    RigidTransform inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(rotation.transpose() * translation);
    return inv;
  }

  // this ∘ other: apply `other` first.
  RigidTransform compose(const RigidTransform& other) const {
    RigidTransform out;
    out.rotation = rotation * other.rotation;
    out.translation = rotation * other.translation + translation;
    return out;
  }

  bool is_valid(double tol = 1e-9) const {
    const Mat3 rrt = rotation * rotation.transpose();
    return (rrt - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
           std::abs(rotation.determinant() - 1.0) <= tol;
  }
};

// Planar z-axis perturbation applied to the scan before registration.
struct Perturbation {
  double yaw = 0.0;  // radians in [-pi, pi)
  double dx = 0.0;   // meters, |dx| <= 10
  double dy = 0.0;

  RigidTransform as_transform() const {
    RigidTransform t;
    t.rotation = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
    t.translation = Vec3(dx, dy, 0.0);
    return t;
  }
};

// Pinhole projection of a camera-frame point; returns depth lambda.
inline double project_pinhole(const Mat3& intrinsics, const RigidTransform& world_to_cam,
                              const Vec3& world, double* u, double* v) {
  const Vec3 cam = world_to_cam.apply(world);
  const Vec3 h = intrinsics * cam;
  if (cam.z() != 0.0) {
    *u = h.x() / cam.z();
    *v = h.y() / cam.z();
  } else {
    *u = *v = 0.0;
  }
  return cam.z();
}

}  // namespace regforge
