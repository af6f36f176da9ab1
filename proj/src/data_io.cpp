#include "regforge/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "regforge/io_util.hpp"

namespace regforge {

LidarScan load_kitti_scan(const std::string& path, int num_rings, RingMode ring_mode) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw Error(ErrorCode::io, "cannot open scan file: " + path);
  const std::streamsize size = in.tellg();
  if (size % 16 != 0)
    throw Error(ErrorCode::format,
                "scan file length not a multiple of 16 bytes: " + path);
  const std::size_t n = static_cast<std::size_t>(size) / 16;
  if (n == 0) throw Error(ErrorCode::empty_input, "scan file holds no points: " + path);

  std::vector<float> raw(n * 4);
  in.seekg(0);
  in.read(reinterpret_cast<char*>(raw.data()), size);
  if (!in) throw Error(ErrorCode::io, "short read on scan file: " + path);

  LidarScan scan;
  scan.num_rings = num_rings;
  scan.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    LidarPoint& p = scan.points[i];
    p.x = raw[i * 4 + 0];
    p.y = raw[i * 4 + 1];
    p.z = raw[i * 4 + 2];
    p.reflectance = std::clamp<double>(raw[i * 4 + 3], 0.0, 1.0);
  }
  const std::vector<int> rings = ring_mode == RingMode::azimuth_wrap
                                     ? infer_rings(scan.points, num_rings)
                                     : infer_rings_theta_bins(scan.points, num_rings);
  for (std::size_t i = 0; i < n; ++i) scan.points[i].ring = rings[i];
  return scan;
}

void save_kitti_scan(const LidarScan& scan, const std::string& path) {
  std::vector<float> raw(scan.points.size() * 4);
  for (std::size_t i = 0; i < scan.points.size(); ++i) {
    const LidarPoint& p = scan.points[i];
    raw[i * 4 + 0] = static_cast<float>(p.x);
    raw[i * 4 + 1] = static_cast<float>(p.y);
    raw[i * 4 + 2] = static_cast<float>(p.z);
    raw[i * 4 + 3] = static_cast<float>(p.reflectance);
  }
  atomic_write(path, reinterpret_cast<const char*>(raw.data()), raw.size() * sizeof(float));
}

std::vector<int> infer_rings(const std::vector<LidarPoint>& points, int num_rings) {
  std::vector<int> rings(points.size(), 0);
  if (points.empty()) return rings;
  int ring = 0;
  double prev_phi = std::atan2(points[0].y, points[0].x);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double phi = std::atan2(points[i].y, points[i].x);
    if (phi - prev_phi < -M_PI) ring = std::min(ring + 1, num_rings - 1);
    rings[i] = ring;
    prev_phi = phi;
  }
  return rings;
}

std::vector<int> infer_rings_theta_bins(const std::vector<LidarPoint>& points, int num_rings) {
  std::vector<int> rings(points.size(), 0);
  if (points.empty()) return rings;
  double lo = 1e30, hi = -1e30;
  std::vector<double> theta(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const LidarPoint& p = points[i];
    const double r = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
    theta[i] = r > 0.0 ? std::acos(p.z / r) : 0.0;
    lo = std::min(lo, theta[i]);
    hi = std::max(hi, theta[i]);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int bin = static_cast<int>((theta[i] - lo) / span * num_rings);
    rings[i] = std::clamp(bin, 0, num_rings - 1);
  }
  return rings;
}

LidarScan apply_perturbation(const LidarScan& scan, const Perturbation& p,
                             PerturbationStage stage) {
  LidarScan out = scan;
  if (stage == PerturbationStage::rotation_only) {
    const double c = std::cos(p.yaw), s = std::sin(p.yaw);
    for (LidarPoint& pt : out.points) {
      const double x = c * pt.x - s * pt.y;
      const double y = s * pt.x + c * pt.y;
      pt.x = x;
      pt.y = y;
    }
  } else {
    for (LidarPoint& pt : out.points) {
      pt.x += p.dx;
      pt.y += p.dy;
    }
  }
  return out;
}

Perturbation sample_perturbation(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> yaw_dist(-M_PI, M_PI);
  std::uniform_real_distribution<double> t_dist(-10.0, 10.0);
  Perturbation p;
  p.yaw = yaw_dist(rng);
  p.dx = t_dist(rng);
  p.dy = t_dist(rng);
  return p;
}

KittiCalibration load_kitti_calibration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open calibration file: " + path);
  KittiCalibration calib;
  bool have_p2 = false, have_tr = false;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (!key.empty() && key.back() == ':') key.pop_back();
    std::vector<double> vals;
    double v;
    while (ls >> v) vals.push_back(v);
    if (vals.size() != 12) continue;
    if (key == "P2") {
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) calib.intrinsics(r, c) = vals[r * 4 + c];
      have_p2 = true;
    } else if (key == "Tr") {
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) calib.velo_to_cam.rotation(r, c) = vals[r * 4 + c];
        calib.velo_to_cam.translation(r) = vals[r * 4 + 3];
      }
      have_tr = true;
    }
  }
  if (!have_p2 || !have_tr)
    throw Error(ErrorCode::format, "calibration file missing P2 or Tr row: " + path);
  return calib;
}

}  // namespace regforge
