#pragma once

#include <Eigen/Dense>
#include <string>

#include "regforge/types.hpp"

namespace regforge {

enum class MapKind { reflectance, depth };

// Ring x azimuth image of the scan plus the pixel -> point-index mapping that
// makes the projection invertible.
struct ProjectionMap {
  Eigen::MatrixXd values;                               // H_r x W_r
  Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic> index;  // -1 = empty
  MapKind kind = MapKind::reflectance;

  int rows() const { return static_cast<int>(values.rows()); }
  int cols() const { return static_cast<int>(values.cols()); }
  bool occupied(int row, int col) const { return index(row, col) >= 0; }
};

struct SphericalCoords {
  double r = 0.0;      // meters
  double theta = 0.0;  // [0, pi], from +z
  double phi = 0.0;    // (-pi, pi], 0 at the pole by convention
};

SphericalCoords spherical_coords(const Vec3& p);

ProjectionMap project(const LidarScan& scan, int width, MapKind kind);

// Azimuth column for a point, matching project()'s binning.
int azimuth_column(double phi, int width);

Vec3 lift(const ProjectionMap& map, int row, int col, const LidarScan& scan);

// Map rasterized to 8-bit: reflectance scaled by 255, depth by 255/max_depth.
std::string map_to_pgm(const ProjectionMap& map, double max_depth = 80.0);
void save_map_artifacts(const ProjectionMap& map, const std::string& prefix,
                        double max_depth = 80.0);

}  // namespace regforge
