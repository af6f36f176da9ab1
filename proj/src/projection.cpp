#include "regforge/projection.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "regforge/io_util.hpp"

namespace regforge {

SphericalCoords spherical_coords(const Vec3& p) {
  SphericalCoords sc;
  sc.r = p.norm();
  if (sc.r == 0.0)
    throw Error(ErrorCode::degenerate, "spherical coordinates undefined at the origin");
  sc.theta = std::acos(std::clamp(p.z() / sc.r, -1.0, 1.0));
  sc.phi = (p.x() == 0.0 && p.y() == 0.0) ? 0.0 : std::atan2(p.y(), p.x());
  return sc;
}

int azimuth_column(double phi, int width) {
  const int col = static_cast<int>(std::floor((phi + M_PI) / (2.0 * M_PI) * width));
  return std::clamp(col, 0, width - 1);
}

ProjectionMap project(const LidarScan& scan, int width, MapKind kind) {
  if (width <= 0) throw Error(ErrorCode::contract, "map width must be positive");
  if (scan.points.empty()) throw Error(ErrorCode::empty_input, "cannot project empty scan");

  ProjectionMap map;
  map.kind = kind;
  map.values = Eigen::MatrixXd::Zero(scan.num_rings, width);
  map.index.setConstant(scan.num_rings, width, -1);
  Eigen::MatrixXd range = Eigen::MatrixXd::Constant(scan.num_rings, width, 1e30);

  for (std::size_t i = 0; i < scan.points.size(); ++i) {
    const LidarPoint& p = scan.points[i];
    const Vec3 pos(p.x, p.y, p.z);
    if (pos.squaredNorm() == 0.0) continue;
    const SphericalCoords sc = spherical_coords(pos);
    const int row = p.ring;
    const int col = azimuth_column(sc.phi, width);
    if (sc.r >= range(row, col)) continue;  // nearest point wins the cell
    range(row, col) = sc.r;
    map.index(row, col) = static_cast<std::int32_t>(i);
    map.values(row, col) = kind == MapKind::reflectance ? p.reflectance : sc.r;
  }
  return map;
}

Vec3 lift(const ProjectionMap& map, int row, int col, const LidarScan& scan) {
  if (row < 0 || row >= map.rows() || col < 0 || col >= map.cols() ||
      !map.occupied(row, col))
    throw Error(ErrorCode::contract, "lift on unoccupied map pixel");
  const LidarPoint& p = scan.points[static_cast<std::size_t>(map.index(row, col))];
  return Vec3(p.x, p.y, p.z);
}

std::string map_to_pgm(const ProjectionMap& map, double max_depth) {
  std::ostringstream out;
  out << "P5\n" << map.cols() << " " << map.rows() << "\n255\n";
  const double scale = map.kind == MapKind::reflectance ? 255.0 : 255.0 / max_depth;
  for (int r = 0; r < map.rows(); ++r)
    for (int c = 0; c < map.cols(); ++c) {
      const double v = std::clamp(map.values(r, c) * scale, 0.0, 255.0);
      out.put(static_cast<char>(static_cast<unsigned char>(v + 0.5)));
    }
  return out.str();
}

void save_map_artifacts(const ProjectionMap& map, const std::string& prefix,
                        double max_depth) {
  atomic_write(prefix + ".pgm", map_to_pgm(map, max_depth));

  std::string idx(static_cast<std::size_t>(map.rows()) * map.cols() * 4, '\0');
  auto* out = reinterpret_cast<std::int32_t*>(idx.data());
  for (int r = 0; r < map.rows(); ++r)
    for (int c = 0; c < map.cols(); ++c) *out++ = map.index(r, c);
  atomic_write(prefix + ".idx", idx);

  nlohmann::json header;
  header["rows"] = map.rows();
  header["cols"] = map.cols();
  header["kind"] = map.kind == MapKind::reflectance ? "reflectance" : "depth";
  atomic_write(prefix + ".json", header.dump(2) + "\n");
}

}  // namespace regforge
