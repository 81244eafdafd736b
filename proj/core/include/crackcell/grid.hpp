#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "crackcell/voxel_image.hpp"

namespace crackcell {

// Axis-aligned cube grid covering the image bounding box. Cells overlapping
// at least one inside voxel are active; active cells also overlapping outside
// voxels (or space beyond the image extent) are cut.
struct EmbeddedGrid {
  Eigen::Vector3d origin{0.0, 0.0, 0.0};
  double h = 0.0;  // cell edge length [mm]
  int p = 1;       // polynomial order the grid was built for
  Eigen::Vector3i num_cells{0, 0, 0};

  std::vector<std::int64_t> active_cells;  // sorted full-grid linear ids
  std::vector<std::int32_t> active_index;  // full-grid id -> active id or -1
  std::vector<std::uint8_t> cut;           // per active cell

  std::int64_t num_cells_total() const {
    return static_cast<std::int64_t>(num_cells[0]) * num_cells[1] *
           num_cells[2];
  }
  std::int64_t n_active() const {
    return static_cast<std::int64_t>(active_cells.size());
  }
  std::int64_t cell_id(int i, int j, int k) const {
    return static_cast<std::int64_t>(k) * num_cells[1] * num_cells[0] +
           static_cast<std::int64_t>(j) * num_cells[0] + i;
  }
  Eigen::Vector3i cell_coords(std::int64_t id) const {
    const std::int64_t nx = num_cells[0], ny = num_cells[1];
    return {static_cast<int>(id % nx), static_cast<int>((id / nx) % ny),
            static_cast<int>(id / (nx * ny))};
  }
  Eigen::Vector3d cell_min(const Eigen::Vector3i& c) const {
    return origin + h * c.cast<double>();
  }
  Eigen::Vector3d bbox_min() const { return origin; }
  Eigen::Vector3d bbox_max() const {
    return origin + h * num_cells.cast<double>();
  }
  double cell_volume() const { return h * h * h; }
};

// Builds the active-cell structure for cell size h and order p.
// Throws Error for non-positive h/p or when no voxel is inside.
EmbeddedGrid build_grid(const VoxelImage& image, double h, int p);

// Indicator alpha(x): 1 on inside voxels, alpha_fcm on outside voxels and on
// points inside the grid box but beyond the image extent. Throws Error for
// points outside the grid bounding box.
double indicator(const VoxelImage& image, const EmbeddedGrid& grid,
                 const Eigen::Vector3d& x, double alpha_fcm);

}  // namespace crackcell
