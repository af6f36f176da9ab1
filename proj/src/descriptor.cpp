#include "regforge/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "regforge/io_util.hpp"

namespace regforge {
namespace {

constexpr int kPatch = 8;       // receptive patch per local cell
constexpr int kBlock = 2;       // 4x4 grid of 2x2 blocks inside the patch
constexpr int kOrientBins = 16; // local orientation histogram

inline double px(const Eigen::MatrixXd& v, int r, int c) {
  r = std::clamp(r, 0, static_cast<int>(v.rows()) - 1);
  c = std::clamp(c, 0, static_cast<int>(v.cols()) - 1);
  return v(r, c);
}

}  // namespace

FeatureField reference_descriptor(const GrayImage& img) {
  const Eigen::MatrixXd& v = img.values;
  const int h = img.rows(), w = img.cols();
  if (h < 8 || w < 8) throw Error(ErrorCode::contract, "image too small for descriptor");

  // The map's azimuth axis runs opposite to the camera's horizontal axis
  // (columns grow with phi, which points image-left for a forward camera), so
  // reflectance-map patches are sampled mirror-aware: column order reversed,
  // gx negated, and histogram bins reflected. This keeps map and camera
  // descriptors of the same scene region directly comparable.
  const bool mirror = img.origin == GrayOrigin::reflectance_map;

  FeatureField field;
  field.grid_rows = (h + kLocalStride - 1) / kLocalStride;
  field.grid_cols = (w + kLocalStride - 1) / kLocalStride;
  field.local.setZero(field.grid_rows * field.grid_cols, kLocalChannels);

  for (int gr = 0; gr < field.grid_rows; ++gr) {
    for (int gc = 0; gc < field.grid_cols; ++gc) {
      auto row = field.local.row(gr * field.grid_cols + gc);
      const int r0 = gr * kLocalStride - kPatch / 2 + kLocalStride / 2;
      // The unmirrored patch covers columns [g*4-2, g*4+5]. A mirrored patch
      // must cover the reflected physical span, [g*4-5, g*4+2], so that both
      // modalities describe the same scene footprint around the grid point.
      const int c0 = gc * kLocalStride -
                     (mirror ? kPatch / 2 + kLocalStride / 2 - 1
                             : kPatch / 2 - kLocalStride / 2);
      double hist[kOrientBins] = {0.0};
      double hist_total = 0.0;
      for (int br = 0; br < kPatch / kBlock; ++br) {
        for (int bc = 0; bc < kPatch / kBlock; ++bc) {
          const int block = br * (kPatch / kBlock) + bc;
          double mean = 0.0, gx_mean = 0.0, gy_mean = 0.0;
          for (int i = 0; i < kBlock; ++i) {
            for (int j = 0; j < kBlock; ++j) {
              const int off = bc * kBlock + j;
              const int r = r0 + br * kBlock + i;
              const int c = c0 + (mirror ? kPatch - 1 - off : off);
              const double raw_gx = (px(v, r, c + 1) - px(v, r, c - 1)) / 2.0;
              const double gx = mirror ? -raw_gx : raw_gx;
              const double gy = (px(v, r + 1, c) - px(v, r - 1, c)) / 2.0;
              mean += px(v, r, c);
              gx_mean += gx;
              gy_mean += gy;
              const double mag = std::hypot(gx, gy);
              if (mag > 1e-12) {
                const double ang = std::atan2(gy, gx);  // [-pi, pi]
                int bin = static_cast<int>((ang + M_PI) / (2.0 * M_PI) * kOrientBins);
                bin = std::clamp(bin, 0, kOrientBins - 1);
                hist[bin] += mag;
                hist_total += mag;
              }
            }
          }
          const double norm = kBlock * kBlock * 255.0;
          row(block) = mean / norm;
          row(16 + block) = gx_mean / norm;
          row(32 + block) = gy_mean / norm;
        }
      }
      if (hist_total > 0.0)
        for (int b = 0; b < kOrientBins; ++b) row(48 + b) = hist[b] / hist_total;
    }
  }

  // Global: joint histogram of intensity octant (8) x gradient orientation
  // quadrant (4) x spatial cell of a 4x4 partition (16) = 512 bins.
  field.global.setZero(kGlobalChannels);
  for (int r = 1; r < h - 1; ++r) {
    for (int c = 1; c < w - 1; ++c) {
      const int octant = std::clamp(static_cast<int>(v(r, c) / 32.0), 0, 7);
      const double raw_gx = (v(r, c + 1) - v(r, c - 1)) / 2.0;
      const double gx = mirror ? -raw_gx : raw_gx;
      const double gy = (v(r + 1, c) - v(r - 1, c)) / 2.0;
      int quad = 0;
      if (gx != 0.0 || gy != 0.0) {
        const double ang = std::atan2(gy, gx);
        quad = std::clamp(static_cast<int>((ang + M_PI) / (M_PI / 2.0)), 0, 3);
      }
      const int sr = std::min(r * 4 / h, 3);
      const int sc_raw = std::min(c * 4 / w, 3);
      const int sc = mirror ? 3 - sc_raw : sc_raw;
      field.global(octant * 64 + quad * 16 + sr * 4 + sc) += 1.0;
    }
  }
  const double total = field.global.sum();
  if (total > 0.0) field.global /= total;
  return field;
}

ReductionMap make_default_reduction(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd m(kFusedDim, kDescriptorDim);
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) m(r, c) = gauss(rng);
  // thin QR gives orthonormal columns; rows of the transpose are orthonormal
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(kFusedDim, kDescriptorDim);
  return q.transpose();
}

ReductionMap make_identity_block_reduction() {
  ReductionMap m = Eigen::MatrixXd::Zero(kDescriptorDim, kFusedDim);
  m.leftCols(kDescriptorDim).setIdentity();
  return m;
}

DescriptorSet fuse_and_sample(const FeatureField& field,
                              const Eigen::VectorXd& other_global,
                              const EdgeSet& edges, const ReductionMap& reduction,
                              DescriptorSource source, Eigen::MatrixXd* fused_out) {
  if (other_global.size() != kGlobalChannels)
    throw Error(ErrorCode::contract, "global vector has wrong dimension");
  if (reduction.rows() != kDescriptorDim || reduction.cols() != kFusedDim)
    throw Error(ErrorCode::contract, "reduction map has wrong shape");

  const int n = edges.size();
  Eigen::MatrixXd fused(n, kFusedDim);
  for (int i = 0; i < n; ++i) {
    const int u = edges.pixels(i, 0), v = edges.pixels(i, 1);
    if (u < 0 || v < 0 || u >= field.grid_rows * kLocalStride + kLocalStride ||
        v >= field.grid_cols * kLocalStride + kLocalStride)
      throw Error(ErrorCode::contract, "edge pixel outside image bounds");
    // clamp-to-edge bilinear sample at (u/4, v/4) on the cell lattice
    const double fr = std::clamp(u / static_cast<double>(kLocalStride), 0.0,
                                 field.grid_rows - 1.0);
    const double fc = std::clamp(v / static_cast<double>(kLocalStride), 0.0,
                                 field.grid_cols - 1.0);
    const int r0 = static_cast<int>(fr), c0 = static_cast<int>(fc);
    const int r1 = std::min(r0 + 1, field.grid_rows - 1);
    const int c1 = std::min(c0 + 1, field.grid_cols - 1);
    const double ar = fr - r0, ac = fc - c0;
    fused.row(i).head(kLocalChannels) =
        (1 - ar) * (1 - ac) * field.cell(r0, c0) + (1 - ar) * ac * field.cell(r0, c1) +
        ar * (1 - ac) * field.cell(r1, c0) + ar * ac * field.cell(r1, c1);
    fused.row(i).tail(kGlobalChannels) = other_global.transpose();
  }

  DescriptorSet set;
  set.source = source;
  if (fused_out) {
    Eigen::MatrixXd reduced = fused * reduction.transpose();
    for (int i = 0; i < n; ++i) {
      const double norm = reduced.row(i).norm();
      if (norm > 1e-12) reduced.row(i) /= norm;
    }
    set.vectors = reduced.cast<float>();
    *fused_out = std::move(fused);
  } else {
    // single-precision multiply keeps the per-scene path fast
    Eigen::MatrixXf reduced =
        fused.cast<float>() * reduction.cast<float>().transpose();
    for (int i = 0; i < n; ++i) {
      const float norm = reduced.row(i).norm();
      if (norm > 1e-12f) reduced.row(i) /= norm;
    }
    set.vectors = std::move(reduced);
  }
  return set;
}

void save_descriptor_set(const DescriptorSet& set, const std::string& prefix) {
  using RowMajorF =
      Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMajorF rows = set.vectors;
  atomic_write(prefix + ".bin", reinterpret_cast<const char*>(rows.data()),
               static_cast<std::size_t>(rows.size()) * sizeof(float));
  nlohmann::json j;
  j["count"] = set.vectors.rows();
  j["dim"] = set.vectors.cols();
  j["source"] = set.source == DescriptorSource::reflectance ? "reflectance" : "camera";
  j["dtype"] = "float32";
  j["layout"] = "row-major";
  atomic_write(prefix + ".json", j.dump(2) + "\n");
}

DescriptorSet load_descriptor_set(const std::string& prefix) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(prefix + ".json"));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::format, std::string("descriptor header: ") + e.what());
  }
  const int count = j.at("count").get<int>();
  const int dim = j.at("dim").get<int>();
  std::ifstream in(prefix + ".bin", std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + prefix + ".bin");
  Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(count, dim);
  in.read(reinterpret_cast<char*>(rows.data()),
          static_cast<std::streamsize>(rows.size()) * sizeof(float));
  if (in.gcount() != static_cast<std::streamsize>(rows.size() * sizeof(float)))
    throw Error(ErrorCode::format, "descriptor payload shorter than header claims");
  DescriptorSet set;
  set.vectors = rows;
  set.source = j.value("source", "reflectance") == std::string("camera")
                   ? DescriptorSource::camera
                   : DescriptorSource::reflectance;
  return set;
}

}  // namespace regforge
