#include "regforge/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <json.hpp>

namespace regforge {
namespace {

using json = nlohmann::json;

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  double reflectance = 0.0;
};

double pattern_value(const RectPattern& pat, double a, double b) {
  const int cu = std::clamp(static_cast<int>(a * pat.cells_u), 0, pat.cells_u - 1);
  const int cv = std::clamp(static_cast<int>(b * pat.cells_v), 0, pat.cells_v - 1);
  return pat.values[static_cast<std::size_t>(cv) * pat.cells_u + cu];
}

bool intersect_rect(const RectPrimitive& rect, const Vec3& o, const Vec3& d, Hit* hit) {
  const Vec3 n = rect.edge_u.cross(rect.edge_v);
  const double denom = d.dot(n);
  if (std::abs(denom) < 1e-12) return false;
  const double t = (rect.origin - o).dot(n) / denom;
  if (t <= 1e-6) return false;
  const Vec3 local = o + t * d - rect.origin;
  const double uu = rect.edge_u.squaredNorm();
  const double vv = rect.edge_v.squaredNorm();
  const double a = local.dot(rect.edge_u) / uu;
  const double b = local.dot(rect.edge_v) / vv;
  if (a < 0.0 || a > 1.0 || b < 0.0 || b > 1.0) return false;
  if (t >= hit->t) return false;
  hit->t = t;
  hit->reflectance = pattern_value(rect.pattern, a, b);
  return true;
}

bool intersect_cylinder(const CylinderPrimitive& cyl, const Vec3& o, const Vec3& d, Hit* hit) {
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a < 1e-12) return false;
  const double b = 2.0 * (o.x() * d.x() + o.y() * d.y());
  const double c = o.x() * o.x() + o.y() * o.y() - cyl.radius * cyl.radius;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return false;
  const double sq = std::sqrt(disc);
  for (double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
    if (t <= 1e-6 || t >= hit->t) continue;
    const double z = o.z() + t * d.z();
    if (z < cyl.z_min || z > cyl.z_max) continue;
    hit->t = t;
    hit->reflectance = cyl.reflectance;
    return true;
  }
  return false;
}

bool cast_ray(const SceneConfig& cfg, const Vec3& o, const Vec3& d, Hit* hit) {
  bool any = false;
  for (const RectPrimitive& r : cfg.rects) any |= intersect_rect(r, o, d, hit);
  if (cfg.background) any |= intersect_cylinder(*cfg.background, o, d, hit);
  return any || std::isfinite(hit->t);
}

// Cell reflectance is additive: column base + row offset. Column bases follow
// a bounded random walk whose steps keep every vertical boundary inside a
// detection window: larger than the Sobel thresholds demand (camera needs
// > 80/(4*255) ~ 0.078) and smaller than the wavelet threshold (a Haar detail
// coefficient of a step is the step itself, and 50/255 ~ 0.196 would erase
// it from the filtered map while the camera keeps it sharp). Row offsets are
// a second, gentler walk: they cancel exactly across vertical boundaries (so
// edge detection is untouched) yet give every row band its own intensity
// signature, which is what lets descriptors tell apart pixels that sit on the
// same vertical boundary at different heights.
void fill_patterns(SceneConfig* cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> step(0.12, 0.165);
  std::uniform_real_distribution<double> row_step(0.10, 0.16);
  std::bernoulli_distribution coin;
  int rect_index = 0;
  for (RectPrimitive& rect : cfg->rects) {
    // Alternate rects between a dark and a bright intensity band. Rects at
    // different depths are geometric metamers of each other (identical
    // angular cell lattices), so a pose that swaps them reprojects exactly;
    // disjoint value ranges are what veto that swap in the descriptors.
    const double lo = 0.25 + 0.15 * (rect_index % 2);
    const double hi = 0.60 + 0.15 * (rect_index % 2);
    ++rect_index;
    std::uniform_real_distribution<double> start(lo + 0.05, hi - 0.05);
    const std::size_t n =
        static_cast<std::size_t>(rect.pattern.cells_u) * rect.pattern.cells_v;
    if (rect.pattern.values.size() == n) continue;
    std::vector<double> bases(rect.pattern.cells_u);
    double base = start(rng);
    for (int u = 0; u < rect.pattern.cells_u; ++u) {
      bases[u] = base;
      const double s = step(rng);
      const bool up_ok = base + s <= hi, down_ok = base - s >= lo;
      base += (up_ok && (!down_ok || coin(rng))) ? s : -s;
    }
    std::vector<double> offs(rect.pattern.cells_v);
    double off = 0.0;
    for (int v = 0; v < rect.pattern.cells_v; ++v) {
      offs[v] = off;
      const double s = row_step(rng);
      const bool up_ok = off + s <= 0.20, down_ok = off - s >= -0.20;
      off += (up_ok && (!down_ok || coin(rng))) ? s : -s;
    }
    rect.pattern.values.resize(n);
    for (int v = 0; v < rect.pattern.cells_v; ++v)
      for (int u = 0; u < rect.pattern.cells_u; ++u)
        rect.pattern.values[static_cast<std::size_t>(v) * rect.pattern.cells_u + u] =
            std::clamp(bases[u] + offs[v], 0.02, 0.98);
  }
}

}  // namespace

SyntheticScene generate_synthetic_scene(std::uint64_t seed, const SceneConfig& config) {
  SceneConfig cfg = config;
  fill_patterns(&cfg, seed);

  SyntheticScene scene;
  scene.lidar_to_camera = cfg.lidar_to_camera;
  scene.scan.num_rings = cfg.rings;

  const double deg = M_PI / 180.0;
  for (int ring = 0; ring < cfg.rings; ++ring) {
    // ring 0 = top laser, mirroring the LaserID row order of the map
    const double frac = cfg.rings > 1 ? static_cast<double>(ring) / (cfg.rings - 1) : 0.0;
    const double elev = (cfg.elev_max_deg + frac * (cfg.elev_min_deg - cfg.elev_max_deg)) * deg;
    for (int j = 0; j < cfg.points_per_ring; ++j) {
      const double phi = -M_PI + (j + 0.5) * 2.0 * M_PI / cfg.points_per_ring;
      const Vec3 dir(std::cos(elev) * std::cos(phi), std::cos(elev) * std::sin(phi),
                     std::sin(elev));
      Hit hit;
      if (!cast_ray(cfg, Vec3::Zero(), dir, &hit)) continue;
      LidarPoint p;
      const Vec3 pos = hit.t * dir;
      p.x = pos.x();
      p.y = pos.y();
      p.z = pos.z();
      p.reflectance = hit.reflectance;
      p.ring = ring;
      scene.scan.points.push_back(p);
    }
  }
  if (scene.scan.points.empty())
    throw Error(ErrorCode::degenerate, "synthetic sweep hit no primitive");

  CameraFrame& frame = scene.frame;
  frame.intrinsics = cfg.intrinsics;
  frame.image.height = cfg.image_height;
  frame.image.width = cfg.image_width;
  frame.image.rgb.assign(static_cast<std::size_t>(cfg.image_height) * cfg.image_width * 3, 0);

  const RigidTransform cam_to_lidar = cfg.lidar_to_camera.inverse();
  const Mat3 k_inv = cfg.intrinsics.inverse();
  bool any_hit = false;
  for (int r = 0; r < cfg.image_height; ++r) {
    for (int c = 0; c < cfg.image_width; ++c) {
      const Vec3 ray_cam = k_inv * Vec3(c + 0.5, r + 0.5, 1.0);
      const Vec3 dir = cam_to_lidar.rotation * ray_cam.normalized();
      Hit hit;
      if (!cast_ray(cfg, cam_to_lidar.translation, dir, &hit)) continue;
      any_hit = true;
      const auto red = static_cast<std::uint8_t>(
          std::clamp(hit.reflectance * 255.0 + 0.5, 0.0, 255.0));
      frame.image.at(r, c, 0) = red;
      frame.image.at(r, c, 1) = red / 2;
      frame.image.at(r, c, 2) = red / 3;
    }
  }
  if (!any_hit) throw Error(ErrorCode::degenerate, "camera sees no primitive");
  return scene;
}

namespace {

RigidTransform forward_camera_extrinsic() {
  // Camera looks along lidar +x: cam x = -y_l, cam y = -z_l, cam z = x_l.
  RigidTransform t;
  t.rotation << 0, -1, 0, 0, 0, -1, 1, 0, 0;
  t.translation = Vec3(0.0, -0.06, 0.1);
  return t;
}

}  // namespace

SceneConfig make_wall_scene_config(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist_near(8.0, 11.0);
  std::uniform_real_distribution<double> dist_sep(3.0, 5.0);
  std::uniform_real_distribution<double> jitter(-0.5, 0.5);
  std::bernoulli_distribution coin;

  SceneConfig cfg;
  // Two side-by-side panels at different depths. A single frontal plane
  // leaves pose nearly unconstrained along the yaw/lateral-shift valley
  // (rotational image flow is depth-free, translational flow is f*t/Z; with
  // one depth they cancel to ~1 px). A second depth makes the compensating
  // shift miss the other panel by f*t*(1/Z1 - 1/Z2), several pixels, which
  // pins yaw. Because the camera sits ~0.1 m from the lidar origin, both
  // panels subtend the same angles in both sensors, so the cell lattice
  // stays commensurate per panel (cross-panel focal mismatch ~0.02 px).
  const double d_near = dist_near(rng);
  const double d_far = d_near + dist_sep(rng);
  const bool near_left = coin(rng);

  // The panels stay inside ~+-10 deg of the forward axis so perspective (tan)
  // and angular (map) projections agree to within ~0.6 px across their whole
  // extent. Cell sizes are chosen commensurate with the descriptor lattice:
  // 8 map px per vertical boundary and 4 rings per row band, with camera
  // focal lengths picked so the camera sees the identical spacing. Boundaries
  // then sit at one fixed sub-lattice phase per scene in both modalities, so
  // patch-quantization error is common-mode and cancels out of similarity
  // rankings instead of scrambling them.
  constexpr int kPanelCellsU = 5, kCellsV = 12;
  constexpr int kCellMapPxU = 8;  // azimuth px per pattern column
  constexpr int kCellRingsV = 4;  // rings per pattern row band
  constexpr int kGapCells = 1;    // background strip between the panels
  const double az_cell = kCellMapPxU * 2.0 * M_PI / cfg.points_per_ring;
  const double elev_step = (cfg.elev_max_deg - cfg.elev_min_deg) * M_PI / 180.0 / (cfg.rings - 1);
  const double half_el = kCellsV * kCellRingsV / 2.0 * elev_step;

  // Azimuth increases toward +y (image left); panel azimuth spans share one
  // cell-width lattice so both panels' boundaries land on the same map phase.
  const double az_gap = 0.5 * kGapCells * az_cell;
  double fx_ref = 0.0, fy_ref = 0.0, cam_depth_ref = 0.0;
  for (int side = 0; side < 2; ++side) {
    const bool left = side == 0;
    const double d = (left == near_left) ? d_near : d_far;
    const double az_lo = left ? az_gap : -(az_gap + kPanelCellsU * az_cell);
    const double az_hi = az_lo + kPanelCellsU * az_cell;
    const double y_lo = d * std::tan(az_lo);
    const double panel_w = d * (std::tan(az_hi) - std::tan(az_lo));
    const double panel_h = 2.0 * d * std::tan(half_el);
    RectPrimitive panel;
    panel.origin = Vec3(d, y_lo, -0.5 * panel_h + jitter(rng));
    panel.edge_u = Vec3(0.0, panel_w, 0.0);
    panel.edge_v = Vec3(0.0, 0.0, panel_h);
    panel.pattern.cells_u = kPanelCellsU;
    panel.pattern.cells_v = kCellsV;
    cfg.rects.push_back(panel);
    if (d == d_near) {
      // The camera sits 0.1 m behind the lidar along the optical axis, so its
      // depth to a panel is d + 0.1; fold that into the focal lengths so
      // pattern cells subtend exactly 8 x 4 camera px like they do in the map.
      cam_depth_ref = d + 0.1;
      fx_ref = kPanelCellsU * kCellMapPxU * cam_depth_ref / panel_w;
      fy_ref = kCellsV * kCellRingsV * cam_depth_ref / panel_h;
    }
  }
  cfg.background = CylinderPrimitive{};

  cfg.image_height = 80;
  cfg.image_width = 160;
  cfg.lidar_to_camera = forward_camera_extrinsic();
  // Choose cy so a point at zero elevation lands a multiple of 4 px from the
  // row where ring spacing places it in the map (row 21 = elev_max/elev_step).
  // Both images then sample the wall at the same sub-lattice phase vertically;
  // without this the descriptor grid reads one modality on-cell and the other
  // mid-cell, halving its vertical contrast. The 0.06 m camera height offset
  // enters through the projection of z=0 and is compensated exactly (to
  // ~0.3 px on the far panel, whose parallax term differs slightly).
  const double cy = 41.0 + 0.06 * fy_ref / cam_depth_ref;
  cfg.intrinsics << fx_ref, 0, cfg.image_width / 2.0, 0, fy_ref, cy, 0, 0, 1;
  return cfg;
}

SceneConfig make_stripe_wall_config(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  std::uniform_real_distribution<double> dist_d(8.0, 11.0);
  std::uniform_real_distribution<double> jitter(-0.2, 0.2);

  SceneConfig cfg;
  const double d = dist_d(rng);

  // One flat striped wall, kept short (8 rings) so every descriptor patch
  // sees the top/bottom borders: with row-constant stripes those borders are
  // the only vertical cue, and without them every point on a stripe boundary
  // would share one descriptor and the softmax would split its mass.
  constexpr int kCellsU = 10;
  constexpr int kCellMapPxU = 8;
  constexpr int kWallRings = 8;
  const double az_cell = kCellMapPxU * 2.0 * M_PI / cfg.points_per_ring;
  const double elev_step = (cfg.elev_max_deg - cfg.elev_min_deg) * M_PI / 180.0 / (cfg.rings - 1);
  const double half_az = kCellsU / 2.0 * az_cell;
  const double half_el = kWallRings / 2.0 * elev_step;
  const double wall_w = 2.0 * d * std::tan(half_az);
  const double wall_h = 2.0 * d * std::tan(half_el);

  RectPrimitive wall;
  wall.origin = Vec3(d, -0.5 * wall_w, -0.5 * wall_h + jitter(rng));
  wall.edge_u = Vec3(0.0, wall_w, 0.0);
  wall.edge_v = Vec3(0.0, 0.0, wall_h);
  wall.pattern.cells_u = kCellsU;
  wall.pattern.cells_v = 1;  // pure vertical stripes, flat geometry
  cfg.rects.push_back(wall);

  // Background just behind the wall: the 1 m border step is ~3 gray levels
  // in the depth map, far below the edge threshold, so the depth map is
  // featureless and only the reflectance stripes carry registration signal.
  CylinderPrimitive bg;
  bg.radius = d + 1.0;
  cfg.background = bg;

  cfg.image_height = 80;
  cfg.image_width = 160;
  cfg.lidar_to_camera = forward_camera_extrinsic();
  const double cam_depth = d + 0.1;
  const double fx = kCellsU * kCellMapPxU * cam_depth / wall_w;
  const double fy = kWallRings * cam_depth / wall_h;
  const double cy = 41.0 + 0.06 * fy / cam_depth;
  cfg.intrinsics << fx, 0, cfg.image_width / 2.0, 0, fy, cy, 0, 0, 1;
  return cfg;
}

SceneConfig scene_config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::format, std::string("scene config parse error: ") + e.what());
  }
  SceneConfig cfg;
  cfg.rings = j.value("rings", cfg.rings);
  cfg.points_per_ring = j.value("points_per_ring", cfg.points_per_ring);
  cfg.elev_min_deg = j.value("elev_min_deg", cfg.elev_min_deg);
  cfg.elev_max_deg = j.value("elev_max_deg", cfg.elev_max_deg);
  if (j.contains("image_size")) {
    cfg.image_height = j["image_size"][0];
    cfg.image_width = j["image_size"][1];
  }
  if (j.contains("intrinsics")) {
    const auto& k = j["intrinsics"];
    cfg.intrinsics << k[0], 0, k[2], 0, k[1], k[3], 0, 0, 1;  // fx, fy, cx, cy
  }
  if (j.contains("extrinsic")) {
    const auto& e = j["extrinsic"];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) cfg.lidar_to_camera.rotation(r, c) = e[r * 4 + c];
      cfg.lidar_to_camera.translation(r) = e[r * 4 + 3];
    }
  }
  for (const auto& p : j.value("primitives", json::array())) {
    const std::string type = p.value("type", "rect");
    if (type == "rect") {
      RectPrimitive rect;
      for (int i = 0; i < 3; ++i) {
        rect.origin(i) = p["origin"][i];
        rect.edge_u(i) = p["edge_u"][i];
        rect.edge_v(i) = p["edge_v"][i];
      }
      rect.pattern.cells_u = p.value("cells_u", 1);
      rect.pattern.cells_v = p.value("cells_v", 1);
      if (p.contains("values"))
        rect.pattern.values = p["values"].get<std::vector<double>>();
      cfg.rects.push_back(rect);
    } else if (type == "cylinder") {
      CylinderPrimitive cyl;
      cyl.radius = p.value("radius", cyl.radius);
      cyl.z_min = p.value("z_min", cyl.z_min);
      cyl.z_max = p.value("z_max", cyl.z_max);
      cyl.reflectance = p.value("reflectance", cyl.reflectance);
      cfg.background = cyl;
    } else {
      throw Error(ErrorCode::format, "unknown primitive type: " + type);
    }
  }
  return cfg;
}

std::string scene_config_to_json(const SceneConfig& cfg) {
  json j;
  j["rings"] = cfg.rings;
  j["points_per_ring"] = cfg.points_per_ring;
  j["elev_min_deg"] = cfg.elev_min_deg;
  j["elev_max_deg"] = cfg.elev_max_deg;
  j["image_size"] = {cfg.image_height, cfg.image_width};
  j["intrinsics"] = {cfg.intrinsics(0, 0), cfg.intrinsics(1, 1), cfg.intrinsics(0, 2),
                     cfg.intrinsics(1, 2)};
  std::vector<double> ext;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) ext.push_back(cfg.lidar_to_camera.rotation(r, c));
    ext.push_back(cfg.lidar_to_camera.translation(r));
  }
  j["extrinsic"] = ext;
  json prims = json::array();
  for (const RectPrimitive& rect : cfg.rects) {
    json p;
    p["type"] = "rect";
    p["origin"] = {rect.origin.x(), rect.origin.y(), rect.origin.z()};
    p["edge_u"] = {rect.edge_u.x(), rect.edge_u.y(), rect.edge_u.z()};
    p["edge_v"] = {rect.edge_v.x(), rect.edge_v.y(), rect.edge_v.z()};
    p["cells_u"] = rect.pattern.cells_u;
    p["cells_v"] = rect.pattern.cells_v;
    if (!rect.pattern.values.empty()) p["values"] = rect.pattern.values;
    prims.push_back(p);
  }
  if (cfg.background) {
    json p;
    p["type"] = "cylinder";
    p["radius"] = cfg.background->radius;
    p["z_min"] = cfg.background->z_min;
    p["z_max"] = cfg.background->z_max;
    p["reflectance"] = cfg.background->reflectance;
    prims.push_back(p);
  }
  j["primitives"] = prims;
  return j.dump(2);
}

}  // namespace regforge
