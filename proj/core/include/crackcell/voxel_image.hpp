#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace crackcell {

// What the scalar stored per voxel means. hu values pass through the scanner
// calibration line, rho_k2hpo4 through the ash conversion, rho_ash is used
// directly. All densities in g/cm^3, lengths in mm.
enum class ImageKind { Hu, RhoK2hpo4, RhoAsh };

ImageKind parse_image_kind(const std::string& name);
std::string image_kind_name(ImageKind kind);

// Regular voxel grid, x-fastest storage. origin is the outer corner of voxel
// (0,0,0). A voxel is "inside" the physical domain per the mask when present,
// otherwise per value >= inside_threshold.
struct VoxelImage {
  Eigen::Vector3i dims{0, 0, 0};
  Eigen::Vector3d spacing{1.0, 1.0, 1.0};
  Eigen::Vector3d origin{0.0, 0.0, 0.0};
  ImageKind kind = ImageKind::RhoAsh;
  std::vector<double> values;
  std::vector<std::uint8_t> mask;  // empty, or one byte per voxel (0/1)
  std::optional<double> inside_threshold;

  std::int64_t num_voxels() const {
    return static_cast<std::int64_t>(dims[0]) * dims[1] * dims[2];
  }
  std::int64_t linear_index(int i, int j, int k) const {
    return static_cast<std::int64_t>(k) * dims[1] * dims[0] +
           static_cast<std::int64_t>(j) * dims[0] + i;
  }
  bool in_bounds(int i, int j, int k) const {
    return i >= 0 && i < dims[0] && j >= 0 && j < dims[1] && k >= 0 &&
           k < dims[2];
  }
  Eigen::Vector3d bbox_min() const { return origin; }
  Eigen::Vector3d bbox_max() const {
    return origin + spacing.cwiseProduct(dims.cast<double>());
  }

  // Voxel containing x. Points exactly on an interior voxel face belong to
  // the lower-index voxel. Returns false if x lies outside the image extent.
  bool voxel_of(const Eigen::Vector3d& x, Eigen::Vector3i& idx) const;

  bool inside(std::int64_t voxel) const;
  bool has_inside_rule() const {
    return !mask.empty() || inside_threshold.has_value();
  }
  std::int64_t count_inside() const;

  // Throws Error on inconsistent sizes, non-positive spacing or dims, mask
  // values other than 0/1, or a missing inside rule.
  void validate() const;
};

}  // namespace crackcell
