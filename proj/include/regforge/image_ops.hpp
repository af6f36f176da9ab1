#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "regforge/projection.hpp"
#include "regforge/types.hpp"

namespace regforge {

enum class GrayOrigin { reflectance_map, camera_red };

// Real-valued intensity image in [0, 255].
struct GrayImage {
  Eigen::MatrixXd values;
  GrayOrigin origin = GrayOrigin::camera_red;

  int rows() const { return static_cast<int>(values.rows()); }
  int cols() const { return static_cast<int>(values.cols()); }
};

struct EdgeSet {
  Eigen::Matrix<int, Eigen::Dynamic, 2> pixels;  // (row, col)
  Eigen::VectorXd scores;                        // non-increasing
  int target_count = 0;
  int real_count = 0;  // candidates before padding
  bool padded = false;

  int size() const { return static_cast<int>(pixels.rows()); }
};

struct TargetSize {
  int height = 0;
  int width = 0;
};

// R channel verbatim; optional area-average resampling to the target size.
GrayImage red_channel(const CameraFrame& frame,
                      std::optional<TargetSize> target = std::nullopt);

GrayImage gray_from_map(const ProjectionMap& map, double max_depth = 80.0);

enum class WaveletMode {
  suppress_large,  // zero high-frequency coefficients with |c| > threshold
  suppress_small,  // the main-text reading; zero |c| < threshold
};

// One-level orthonormal 2D Haar transform; LL band untouched. Odd dimensions
// are edge-replicated to even before the transform and cropped after.
GrayImage wavelet_filter(const GrayImage& img, double threshold,
                         WaveletMode mode = WaveletMode::suppress_large);

// |img (*) Sobel_left| on interior pixels; Sobel_right is its negation, so the
// one magnitude covers both kernels.
Eigen::MatrixXd sobel_response(const GrayImage& img);

// Threshold + 3x3 non-maximum suppression + top-N by score; pads by repeating
// the last candidate when fewer than target_count survive.
EdgeSet sobel_edges(const GrayImage& img, double threshold, int target_count);

std::string edge_set_to_csv(const EdgeSet& edges);

constexpr double kWaveletIdentityThreshold = std::numeric_limits<double>::infinity();

}  // namespace regforge
