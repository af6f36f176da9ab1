#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "regforge/image_ops.hpp"

namespace regforge {

inline constexpr int kLocalChannels = 64;    // C_l
inline constexpr int kGlobalChannels = 512;  // C_g
inline constexpr int kDescriptorDim = 64;    // C_d
inline constexpr int kFusedDim = kLocalChannels + kGlobalChannels;
inline constexpr int kLocalStride = 4;       // local grid at 1/4 resolution

// Deterministic stand-in for the learned feature branches, with the same
// tensor shapes: a 1/4-scale local grid of C_l channels and a C_g global
// histogram vector.
struct FeatureField {
  int grid_rows = 0;
  int grid_cols = 0;
  Eigen::MatrixXd local;    // (grid_rows*grid_cols) x C_l, row-major cells
  Eigen::VectorXd global;   // C_g, L1-normalized

  const Eigen::MatrixXd::ConstRowXpr cell(int r, int c) const {
    return local.row(r * grid_cols + c);
  }
};

enum class DescriptorSource { reflectance, camera };

struct DescriptorSet {
  Eigen::MatrixXf vectors;  // N x C_d, unit rows
  DescriptorSource source = DescriptorSource::reflectance;

  int size() const { return static_cast<int>(vectors.rows()); }
};

using ReductionMap = Eigen::MatrixXd;  // C_d x (C_l + C_g)

FeatureField reference_descriptor(const GrayImage& img);

// Seeded random matrix with orthonormal rows, shared across runs.
ReductionMap make_default_reduction(std::uint64_t seed = 0x5eedU);

// [I | 0]: descriptor = normalized local sample when the global vector is zero.
ReductionMap make_identity_block_reduction();

// Bilinear local sample at (row/4, col/4), concatenated with the OTHER
// branch's global vector, reduced to C_d and L2-normalized. `fused_out`, when
// given, receives the N x 576 pre-reduction features (used by training).
DescriptorSet fuse_and_sample(const FeatureField& field,
                              const Eigen::VectorXd& other_global,
                              const EdgeSet& edges, const ReductionMap& reduction,
                              DescriptorSource source,
                              Eigen::MatrixXd* fused_out = nullptr);

// `prefix.bin` holds N x C_d float32 row-major; `prefix.json` records the
// shape and source branch.
void save_descriptor_set(const DescriptorSet& set, const std::string& prefix);
DescriptorSet load_descriptor_set(const std::string& prefix);

}  // namespace regforge
