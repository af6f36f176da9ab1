#include "regforge/image_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace regforge {
namespace {

// Area-average resample; source pixel footprints are clipped against each
// target pixel's back-projected window.
Eigen::MatrixXd resample_area(const Eigen::MatrixXd& src, int out_h, int out_w) {
  const int in_h = static_cast<int>(src.rows());
  const int in_w = static_cast<int>(src.cols());
  const double sy = static_cast<double>(in_h) / out_h;
  const double sx = static_cast<double>(in_w) / out_w;
  Eigen::MatrixXd out(out_h, out_w);
  for (int r = 0; r < out_h; ++r) {
    const double y0 = r * sy, y1 = (r + 1) * sy;
    const int ry0 = static_cast<int>(std::floor(y0));
    const int ry1 = std::min(static_cast<int>(std::ceil(y1)), in_h);
    for (int c = 0; c < out_w; ++c) {
      const double x0 = c * sx, x1 = (c + 1) * sx;
      const int rx0 = static_cast<int>(std::floor(x0));
      const int rx1 = std::min(static_cast<int>(std::ceil(x1)), in_w);
      double acc = 0.0, area = 0.0;
      for (int y = ry0; y < ry1; ++y) {
        const double wy = std::min<double>(y + 1, y1) - std::max<double>(y, y0);
        for (int x = rx0; x < rx1; ++x) {
          const double wx = std::min<double>(x + 1, x1) - std::max<double>(x, x0);
          acc += wy * wx * src(y, x);
          area += wy * wx;
        }
      }
      out(r, c) = acc / area;
    }
  }
  return out;
}

}  // namespace

GrayImage red_channel(const CameraFrame& frame, std::optional<TargetSize> target) {
  const Image8& img = frame.image;
  if (img.height <= 0 || img.width <= 0)
    throw Error(ErrorCode::contract, "empty camera frame");
  Eigen::MatrixXd red(img.height, img.width);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c) red(r, c) = img.at(r, c, 0);
  GrayImage out;
  out.origin = GrayOrigin::camera_red;
  if (target && (target->height != img.height || target->width != img.width))
    out.values = resample_area(red, target->height, target->width);
  else
    out.values = std::move(red);
  return out;
}

GrayImage gray_from_map(const ProjectionMap& map, double max_depth) {
  GrayImage out;
  out.origin = GrayOrigin::reflectance_map;
  const double scale = map.kind == MapKind::reflectance ? 255.0 : 255.0 / max_depth;
  out.values = (map.values * scale).cwiseMin(255.0).cwiseMax(0.0);
  return out;
}

GrayImage wavelet_filter(const GrayImage& img, double threshold, WaveletMode mode) {
  if (threshold < 0.0) throw Error(ErrorCode::contract, "wavelet threshold must be >= 0");
  const int h0 = img.rows(), w0 = img.cols();
  const int h = h0 + (h0 % 2), w = w0 + (w0 % 2);
  Eigen::MatrixXd padded(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      padded(r, c) = img.values(std::min(r, h0 - 1), std::min(c, w0 - 1));

  // Per 2x2 block, orthonormal coefficients: ll = (a+b+c+d)/2 etc., so image
  // amplitudes and the threshold share a scale.
  Eigen::MatrixXd ll(h / 2, w / 2), lh(h / 2, w / 2), hl(h / 2, w / 2), hh(h / 2, w / 2);
  for (int r = 0; r < h / 2; ++r)
    for (int c = 0; c < w / 2; ++c) {
      const double a = padded(2 * r, 2 * c), b = padded(2 * r, 2 * c + 1);
      const double cc = padded(2 * r + 1, 2 * c), d = padded(2 * r + 1, 2 * c + 1);
      ll(r, c) = (a + b + cc + d) / 2.0;
      lh(r, c) = (a - b + cc - d) / 2.0;
      hl(r, c) = (a + b - cc - d) / 2.0;
      hh(r, c) = (a - b - cc + d) / 2.0;
    }

  auto zero = [&](Eigen::MatrixXd& band) {
    for (int r = 0; r < band.rows(); ++r)
      for (int c = 0; c < band.cols(); ++c) {
        const bool hit = mode == WaveletMode::suppress_large
                             ? std::abs(band(r, c)) > threshold
                             : std::abs(band(r, c)) < threshold;
        if (hit) band(r, c) = 0.0;
      }
  };
  zero(lh);
  zero(hl);
  zero(hh);

  Eigen::MatrixXd rec(h, w);
  for (int r = 0; r < h / 2; ++r)
    for (int c = 0; c < w / 2; ++c) {
      rec(2 * r, 2 * c) = (ll(r, c) + lh(r, c) + hl(r, c) + hh(r, c)) / 2.0;
      rec(2 * r, 2 * c + 1) = (ll(r, c) - lh(r, c) + hl(r, c) - hh(r, c)) / 2.0;
      rec(2 * r + 1, 2 * c) = (ll(r, c) + lh(r, c) - hl(r, c) - hh(r, c)) / 2.0;
      rec(2 * r + 1, 2 * c + 1) = (ll(r, c) - lh(r, c) - hl(r, c) + hh(r, c)) / 2.0;
    }

  GrayImage out;
  out.origin = img.origin;
  out.values = rec.topLeftCorner(h0, w0).cwiseMin(255.0).cwiseMax(0.0);
  return out;
}

Eigen::MatrixXd sobel_response(const GrayImage& img) {
  const int h = img.rows(), w = img.cols();
  if (h < 3 || w < 3) throw Error(ErrorCode::contract, "image too small for 3x3 kernel");
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(h, w);
  const Eigen::MatrixXd& v = img.values;
  for (int r = 1; r < h - 1; ++r)
    for (int c = 1; c < w - 1; ++c) {
      const double resp = (v(r - 1, c - 1) + 2.0 * v(r, c - 1) + v(r + 1, c - 1)) -
                          (v(r - 1, c + 1) + 2.0 * v(r, c + 1) + v(r + 1, c + 1));
      g(r, c) = std::abs(resp);
    }
  return g;
}

EdgeSet sobel_edges(const GrayImage& img, double threshold, int target_count) {
  if (target_count <= 0) throw Error(ErrorCode::contract, "target_count must be positive");
  const Eigen::MatrixXd g = sobel_response(img);
  const int h = img.rows(), w = img.cols();

  struct Candidate {
    int row, col;
    double score;
  };
  std::vector<Candidate> raw;
  for (int r = 1; r < h - 1; ++r)
    for (int c = 1; c < w - 1; ++c)
      if (g(r, c) >= threshold && g(r, c) > 0.0) raw.push_back({r, c, g(r, c)});
  if (raw.empty())
    throw Error(ErrorCode::empty_input, "no edge candidates above threshold");

  // Greedy 3x3 NMS: visit by score (ties row-major) and keep a candidate only
  // when no already-kept pixel lies within Chebyshev distance 1. Along a run
  // of equal responses this retains every other pixel instead of collapsing
  // the run to its first element.
  std::sort(raw.begin(), raw.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::uint8_t> kept(static_cast<std::size_t>(h) * w, 0);
  std::vector<Candidate> cands;
  for (const Candidate& cand : raw) {
    bool blocked = false;
    for (int dr = -1; dr <= 1 && !blocked; ++dr)
      for (int dc = -1; dc <= 1 && !blocked; ++dc)
        if (kept[static_cast<std::size_t>(cand.row + dr) * w + (cand.col + dc)])
          blocked = true;
    if (blocked) continue;
    kept[static_cast<std::size_t>(cand.row) * w + cand.col] = 1;
    cands.push_back(cand);
    if (static_cast<int>(cands.size()) == target_count) break;
  }

  EdgeSet edges;
  edges.target_count = target_count;
  edges.real_count = static_cast<int>(cands.size());
  edges.padded = edges.real_count < target_count;
  edges.pixels.resize(target_count, 2);
  edges.scores.resize(target_count);
  for (int i = 0; i < target_count; ++i) {
    const Candidate& c = cands[std::min<std::size_t>(i, cands.size() - 1)];
    edges.pixels(i, 0) = c.row;
    edges.pixels(i, 1) = c.col;
    edges.scores(i) = c.score;
  }
  return edges;
}

std::string edge_set_to_csv(const EdgeSet& edges) {
  std::ostringstream out;
  out << "row,col,score\n";
  for (int i = 0; i < edges.size(); ++i)
    out << edges.pixels(i, 0) << "," << edges.pixels(i, 1) << "," << edges.scores(i)
        << "\n";
  return out.str();
}

}  // namespace regforge
